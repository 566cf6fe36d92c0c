#include "stealth/harness/session.hpp"

#include <algorithm>
#include <variant>

namespace stealth::harness {

namespace {

constexpr std::size_t kTopPosts = 5;
constexpr int kConeSamples = 16;

Json pose_json(const Pose& p) { return {{"x", p.position.x}, {"y", p.position.y}, {"heading", p.heading}}; }
Json point_json(Point p) { return {p.x, p.y}; }
Json cell_json(Cell c) { return {c.x, c.y}; }

Json cone_json(const AgentState& a) {
  Json j{{"id", a.id}, {"pose", pose_json(a.pose)}};
  std::visit(
      [&](const auto& model) {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, InverseDistanceCone>) {
          j["model"] = "inverse_distance";
          j["theta_max"] = model.theta_max;
          j["k"] = model.k;
          j["r_max"] = model.r_max;
          j["d_close"] = model.d_close;
          Json boundary = Json::array();
          if (!model.blind())
            for (int i = 0; i <= kConeSamples; ++i) {
              const double d = model.r_max * i / kConeSamples;
              boundary.push_back({d, half_angle(model, d)});
            }
          j["boundary"] = std::move(boundary);
        } else {
          j["model"] = "multi_cone";
          Json cones = Json::array();
          for (const ViewCone& c : model.cones)
            cones.push_back({{"name", c.name}, {"half_angle", c.half_angle}, {"range", c.range}});
          j["cones"] = std::move(cones);
        }
      },
      a.archetype.vision);
  return j;
}

Json posts_json(const AgentState& a) {
  Json top = Json::array();
  for (std::size_t i = 0; i < a.posts.ratings.size() && top.size() < kTopPosts; ++i) {
    const PostRating& r = a.posts.ratings[i];
    const auto it = std::find_if(a.posts.posts.begin(), a.posts.posts.end(),
                                 [&](const EvaluatedPost& p) { return p.post.id == r.post_id; });
    if (it == a.posts.posts.end()) continue;
    top.push_back({{"id", r.post_id},
                   {"cell", cell_json(it->post.cell)},
                   {"kind", it->post.kind == PostKind::Cover ? "cover" : "open"},
                   {"rating", r.rating},
                   {"rank", top.size() + 1}});
  }
  return {{"id", a.id},
          {"selector", a.posts.selector},
          {"held", a.posts.held ? cell_json(*a.posts.held) : Json(nullptr)},
          {"evaluated", a.posts.posts.size()},
          {"rays", a.posts.rays_this_tick},
          {"top", std::move(top)}};
}

Json canvass_json(const AgentState& a) {
  const CanvassMemory& m = *a.canvass;
  const CanvassGrid& g = m.grid;
  std::string cells;
  cells.reserve(static_cast<std::size_t>(g.span_x() * g.span_y()));
  for (int y = 0; y < g.span_y(); ++y)
    for (int x = 0; x < g.span_x(); ++x) {
      const CanvassCell c = g.at({g.min_cell().x + x, g.min_cell().y + y});
      cells += c == CanvassCell::Unseen ? 'U' : c == CanvassCell::Seen ? 'S' : 'B';
    }
  Json wedge = Json::array();
  for (Cell c : m.last_wedge) wedge.push_back(cell_json(c));
  return {{"id", a.id},
          {"focus", point_json(m.focus)},
          {"min", cell_json(g.min_cell())},
          {"span", {g.span_x(), g.span_y()}},
          {"cells", std::move(cells)},  // row-major from min, south to north
          {"unseen", g.unseen()},
          {"steps", m.steps},
          {"last_wedge", std::move(wedge)}};
}

Json follow_json(const AgentState& a) {
  Json cands = Json::array();
  for (const FollowCandidate& c : a.follow.candidates)
    cands.push_back({{"pos", point_json(c.position)}, {"stage", to_string(c.stage_reached)}, {"score", c.score}});
  return {{"id", a.id},
          {"target", a.follow.target ? point_json(*a.follow.target) : Json(nullptr)},
          {"usable", a.follow.usable},
          {"ticks_without", a.follow.ticks_without},
          {"candidates", std::move(cands)}};
}

}  // namespace

Session::Session(Scenario scenario, std::optional<std::uint64_t> seed, std::map<std::string, double> overrides)
    : scenario_(std::move(scenario)),
      overrides_(std::move(overrides)),
      sim_(scenario_, seed.value_or(scenario_.seed), overrides_) {}

Json Session::error(const std::string& message) const {
  return {{"type", "error"}, {"tick", sim_.state().tick}, {"message", message}};
}

Json Session::meta() const {
  const GridMap& map = sim_.map();
  Json rows = Json::array();
  for (int y = map.height() - 1; y >= 0; --y) {
    std::string row;
    for (int x = 0; x < map.width(); ++x) {
      const CellKind k = map.at({x, y});
      row += k == CellKind::Wall ? '#' : k == CellKind::LowCover ? '~' : '.';
    }
    rows.push_back(std::move(row));
  }
  Json roster = Json::array();
  for (const AgentState& a : sim_.state().agents)
    roster.push_back({{"id", a.id}, {"kind", a.is_player ? "player" : to_string(a.archetype.kind)}});
  return {{"type", "meta"},
          {"tick", sim_.state().tick},
          {"width", map.width()},
          {"height", map.height()},
          {"rows", std::move(rows)},  // first row is the northern edge
          {"legend", {{"#", "wall"}, {"~", "low_cover"}, {".", "free"}}},
          {"agents", std::move(roster)},
          {"seed", sim_.seed()},
          {"tick_rate", scenario_.tick_rate},
          {"paused", paused_}};
}

std::vector<Json> Session::handle(const std::string& text) {
  const Json msg = Json::parse(text, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) return {error("malformed message: not a JSON object")};
  if (!msg.contains("type") || !msg.at("type").is_string()) return {error("malformed message: missing type")};
  const std::string type = msg.at("type").get<std::string>();

  if (type == "hello") {
    greeted_ = true;
    return {meta()};
  }
  if (!greeted_) return {error("hello expected first")};
  if (type == "input") {
    try {
      input_ = input_from_json(msg);
    } catch (const std::exception& e) {
      return {error(std::string("bad input: ") + e.what())};
    }
    return {};
  }
  if (type == "control") {
    const std::string cmd = msg.value("cmd", "");
    if (cmd == "pause") {
      paused_ = true;
    } else if (cmd == "resume") {
      paused_ = false;
    } else if (cmd == "reset") {
      std::uint64_t seed = sim_.seed();
      if (msg.contains("seed") && !msg.at("seed").is_null()) {
        const Json& s = msg.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
          return {error("reset seed must be a non-negative integer")};
        seed = s.get<std::uint64_t>();
      }
      sim_.reset(seed);
      input_ = {};
      applied_.clear();
      return {meta()};
    } else {
      return {error("unknown control command '" + cmd + "'")};
    }
    return {};
  }
  if (type == "set_overlay") {
    const std::pair<const char*, bool*> flags[] = {{"cones", &overlays_.cones},
                                                   {"posts", &overlays_.posts},
                                                   {"canvass", &overlays_.canvass},
                                                   {"follow", &overlays_.follow}};
    for (const auto& [key, flag] : flags)
      if (msg.contains(key) && !msg.at(key).is_boolean())
        return {error(std::string("overlay flag '") + key + "' must be a boolean")};
    for (const auto& [key, flag] : flags) *flag = msg.value(key, *flag);
    return {};
  }
  return {error("unknown message type '" + type + "'")};
}

std::optional<Json> Session::tick() {
  if (paused_ || !greeted_) return std::nullopt;
  applied_.push_back(input_);
  return snapshot(sim_.step(input_));
}

Json Session::snapshot(const TickRecord& record) const {
  Json agents = Json::array();
  for (const AgentRecord& a : record.agents) {
    Json j{{"id", a.id}, {"kind", a.kind}, {"pose", pose_json(a.pose)}, {"alive", a.alive}};
    j["awareness"] = a.kind == "player" ? Json(nullptr) : Json(to_string(a.phase));
    j["skill"] = a.skill ? Json(to_string(*a.skill)) : Json(nullptr);
    agents.push_back(std::move(j));
  }
  Json overlays = Json::object();
  const auto& live = sim_.state().agents;
  if (overlays_.cones) {
    Json cones = Json::array();
    for (const AgentState& a : live)
      if (!a.is_player && a.alive) cones.push_back(cone_json(a));
    overlays["cones"] = std::move(cones);
  }
  if (overlays_.posts) {
    Json posts = Json::array();
    for (const AgentState& a : live)
      if (!a.is_player && a.alive && !a.posts.posts.empty()) posts.push_back(posts_json(a));
    overlays["posts"] = std::move(posts);
  }
  if (overlays_.canvass) {
    Json canvass = Json::array();
    for (const AgentState& a : live)
      if (a.canvass) canvass.push_back(canvass_json(a));
    overlays["canvass"] = std::move(canvass);
  }
  if (overlays_.follow) {
    Json follow = Json::array();
    for (const AgentState& a : live)
      if (!a.is_player && a.archetype.kind == ArchetypeKind::Buddy) follow.push_back(follow_json(a));
    overlays["follow"] = std::move(follow);
  }
  Json sounds = Json::array();
  for (const SoundEvent& e : record.sounds) sounds.push_back(to_json(e));
  return Json{{"type", "snapshot"},
              {"tick", record.tick},
              {"agents", std::move(agents)},
              {"sounds", std::move(sounds)},
              {"player_hits", record.player_hits},
              {"overlays", std::move(overlays)}};
}

}  // namespace stealth::harness
