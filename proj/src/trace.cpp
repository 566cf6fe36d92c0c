#include "stealth/trace.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace stealth {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const PlayerInput& in) {
  Json j{{"move", {in.move.x, in.move.y}}, {"stance", to_string(in.stance)}};
  switch (in.action) {
    case PlayerActionKind::None: j["action"] = nullptr; break;
    case PlayerActionKind::ThrowBrick:
      j["action"] = {{"kind", "throw"}, {"target", {in.throw_target.x, in.throw_target.y}}};
      break;
    case PlayerActionKind::Attack: j["action"] = {{"kind", "attack"}, {"target", in.attack_target}}; break;
  }
  return j;
}

PlayerInput input_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("input must be an object");
  PlayerInput in;
  if (j.contains("move")) {
    const Json& m = j.at("move");
    if (!m.is_array() || m.size() != 2 || !m[0].is_number() || !m[1].is_number())
      throw std::invalid_argument("move must be [dx, dy]");
    in.move = {m[0].get<double>(), m[1].get<double>()};
    if (!is_finite(in.move)) throw std::invalid_argument("move must be finite");
  }
  if (j.contains("stance")) {
    if (!j.at("stance").is_string()) throw std::invalid_argument("stance must be a string");
    const auto s = stance_from_string(j.at("stance").get<std::string>());
    if (!s) throw std::invalid_argument("unknown stance");
    in.stance = *s;
  }
  if (j.contains("action") && !j.at("action").is_null()) {
    const Json& a = j.at("action");
    if (!a.is_object() || !a.contains("kind") || !a.at("kind").is_string())
      throw std::invalid_argument("action needs a kind");
    const std::string kind = a.at("kind").get<std::string>();
    if (kind == "none") return in;
    if (!a.contains("target")) throw std::invalid_argument("action needs a target");
    const Json& t = a.at("target");
    if (kind == "throw") {
      if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
        throw std::invalid_argument("throw target must be [x, y]");
      in.action = PlayerActionKind::ThrowBrick;
      in.throw_target = {t[0].get<double>(), t[1].get<double>()};
    } else if (kind == "attack") {
      if (!t.is_number_integer()) throw std::invalid_argument("attack target must be an agent id");
      in.action = PlayerActionKind::Attack;
      in.attack_target = t.get<int>();
    } else {
      throw std::invalid_argument("unknown action kind");
    }
  }
  return in;
}

namespace {

Json context_json(const SkillContext& c) {
  return {{"phase", to_string(c.phase)},       {"player_visible", c.player_visible},
          {"in_melee_range", c.in_melee_range}, {"throw_in_band", c.throw_in_band},
          {"throw_ready", c.throw_ready},       {"armed", c.armed},
          {"reloading", c.reloading},           {"flank_better", c.flank_better},
          {"has_script", c.has_script},         {"resting", c.resting},
          {"cover_nearby", c.cover_nearby},     {"ally_chasing", c.ally_chasing},
          {"enemy_alert", c.enemy_alert}};
}

}  // namespace

Json to_json(const SoundEvent& e) {
  return {{"pos", {e.position.x, e.position.y}}, {"loudness", e.loudness}, {"source", e.source_agent}};
}

Json to_json(const AgentRecord& r) {
  Json stack = Json::array();
  for (BehaviourId b : r.stack) stack.push_back(to_string(b));
  Json j{{"id", r.id},
         {"kind", r.kind},
         {"pose", {r.pose.position.x, r.pose.position.y, r.pose.heading}},
         {"alive", r.alive}};
  if (r.kind == "player") return j;
  j["phase"] = to_string(r.phase);
  j["focus"] = r.focus ? Json{r.focus->x, r.focus->y} : Json(nullptr);
  j["skill"] = r.skill ? Json(to_string(*r.skill)) : Json(nullptr);
  j["stack"] = std::move(stack);
  j["context"] = context_json(r.context);
  j["post"] = {{"id", r.post_id}, {"count", r.post_count}, {"rays", r.post_rays}};
  j["follow"] = {{"candidates", r.follow_candidates}, {"usable", r.follow_usable}, {"replanned", r.follow_replanned}};
  j["canvass"] = {{"unseen", r.canvass_unseen}, {"initial", r.canvass_initial}, {"epoch", r.canvass_epoch}};
  j["teleported"] = r.teleported;
  j["rng_draws"] = r.rng_draws;
  return j;
}

Json to_json(const TickRecord& r) {
  Json agents = Json::array();
  for (const AgentRecord& a : r.agents) agents.push_back(to_json(a));
  Json sounds = Json::array();
  for (const SoundEvent& e : r.sounds) sounds.push_back(to_json(e));
  return {{"type", "tick"},   {"tick", r.tick},
          {"input", to_json(r.input)}, {"agents", std::move(agents)},
          {"sounds", std::move(sounds)}, {"rng_draws", r.rng_draws},
          {"player_hits", r.player_hits}, {"teleports", r.teleports}};
}

std::string tick_line(const TickRecord& record) { return to_json(record).dump(); }

Json trace_header(const Scenario& scenario, std::uint64_t seed, const std::map<std::string, double>& overrides) {
  Json ov = Json::object();
  for (const auto& [k, v] : overrides) ov[k] = v;
  return {{"type", "header"},
          {"format", "stealth-trace/1"},
          {"seed", seed},
          {"scenario_hash", hex64(fnv1a(scenario.text))},
          {"overrides", std::move(ov)},
          {"scenario", scenario.text}};
}

TraceWriter::TraceWriter(std::ostream& out, const Scenario& scenario, std::uint64_t seed,
                         const std::map<std::string, double>& overrides)
    : out_(out), hash_(fnv1a({})) {
  out_ << trace_header(scenario, seed, overrides).dump() << '\n';
}

void TraceWriter::add(const TickRecord& record) {
  const std::string line = tick_line(record) + '\n';
  hash_ = fnv1a(line, hash_);
  out_ << line;
  ++count_;
}

std::uint64_t TraceWriter::finish() {
  out_ << Json{{"type", "footer"}, {"ticks", count_}, {"hash", hex64(hash_)}}.dump() << '\n';
  out_.flush();
  return hash_;
}

std::uint64_t trace_hash(const std::vector<std::string>& tick_lines) {
  std::uint64_t h = fnv1a({});
  for (const std::string& line : tick_lines) {
    h = fnv1a(line, h);
    h = fnv1a("\n", h);
  }
  return h;
}

TraceFile read_trace(std::istream& in) {
  TraceFile t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace");
  t.header = Json::parse(line, nullptr, false);
  if (t.header.is_discarded() || t.header.value("type", "") != "header")
    throw std::runtime_error("trace does not start with a header line");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.find("\"type\":\"footer\"") != std::string::npos) {
      const Json f = Json::parse(line, nullptr, false);
      if (!f.is_discarded() && f.value("type", "") == "footer") {
        t.footer = f;
        continue;
      }
    }
    t.ticks.push_back(line);
  }
  return t;
}

TraceFile read_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace " + path);
  return read_trace(f);
}

ReplayResult replay_trace(const TraceFile& trace) {
  ReplayResult r;
  r.recorded_hash = trace_hash(trace.ticks);
  const Scenario scenario = load_scenario(trace.header.at("scenario").get<std::string>());
  if (hex64(fnv1a(scenario.text)) != trace.header.value("scenario_hash", ""))
    throw std::runtime_error("scenario hash in header does not match the embedded scenario");
  const auto seed = trace.header.at("seed").get<std::uint64_t>();
  std::map<std::string, double> overrides;
  for (const auto& [k, v] : trace.header.at("overrides").items()) overrides[k] = v.get<double>();

  Simulation sim(scenario, seed, overrides);
  std::vector<std::string> replayed;
  replayed.reserve(trace.ticks.size());
  for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
    const Json rec = Json::parse(trace.ticks[i], nullptr, false);
    PlayerInput in;
    bool parsed = !rec.is_discarded() && rec.contains("input");
    if (parsed) {
      try {
        in = input_from_json(rec.at("input"));
      } catch (const std::exception&) {
        parsed = false;
      }
    }
    const std::string line = tick_line(sim.step(in));
    if (!r.first_divergent_tick && (!parsed || line != trace.ticks[i]))
      r.first_divergent_tick = static_cast<std::int64_t>(i);
    replayed.push_back(line);
  }
  r.replayed_hash = trace_hash(replayed);

  bool footer_ok = true;
  if (trace.footer) {
    footer_ok = trace.footer->value("hash", "") == hex64(r.recorded_hash) &&
                trace.footer->value("ticks", std::int64_t{-1}) == static_cast<std::int64_t>(trace.ticks.size());
  }
  r.match = !r.first_divergent_tick && footer_ok && r.recorded_hash == r.replayed_hash;
  if (r.match) {
    r.message = "hash match " + hex64(r.replayed_hash);
  } else if (r.first_divergent_tick) {
    r.message = "first divergent tick " + std::to_string(*r.first_divergent_tick);
  } else {
    r.message = "footer hash does not match the recorded ticks";
  }
  return r;
}

}  // namespace stealth
