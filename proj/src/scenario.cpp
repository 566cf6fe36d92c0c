#include "stealth/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stealth {

namespace {

constexpr std::array<ArchetypeKind, 6> kKinds = {ArchetypeKind::Runner,  ArchetypeKind::Stalker,
                                                 ArchetypeKind::Clicker, ArchetypeKind::Bloater,
                                                 ArchetypeKind::Hunter,  ArchetypeKind::Buddy};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

InverseDistanceCone* cone_of(Archetype& a) { return std::get_if<InverseDistanceCone>(&a.vision); }
const InverseDistanceCone* cone_of(const Archetype& a) { return std::get_if<InverseDistanceCone>(&a.vision); }

template <class T>
ConfigKey field(std::string name, T AgentTuning::*member) {
  return {std::move(name), [member](const SimConfig& c) { return static_cast<double>(c.agent.*member); },
          [member](SimConfig& c, double v) { c.agent.*member = static_cast<T>(v); }, std::is_integral_v<T>};
}

template <class T>
ConfigKey player_field(std::string name, T PlayerTuning::*member) {
  return {std::move(name), [member](const SimConfig& c) { return static_cast<double>(c.player.*member); },
          [member](SimConfig& c, double v) { c.player.*member = static_cast<T>(v); }, false};
}

template <class S, class T>
ConfigKey nested(std::string name, S AgentTuning::*outer, T S::*inner) {
  return {std::move(name),
          [outer, inner](const SimConfig& c) { return static_cast<double>(c.agent.*outer.*inner); },
          [outer, inner](SimConfig& c, double v) { c.agent.*outer.*inner = static_cast<T>(v); },
          std::is_integral_v<T>};
}

template <class T>
ConfigKey combat(std::string name, ArchetypeKind kind, T CombatParams::*member) {
  return {std::move(name),
          [kind, member](const SimConfig& c) { return static_cast<double>(c.archetype(kind).combat.*member); },
          [kind, member](SimConfig& c, double v) { c.archetype(kind).combat.*member = static_cast<T>(v); },
          std::is_integral_v<T>};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys = {
      nested("awareness.lost_grace", &AgentTuning::awareness, &AwarenessTuning::lost_grace),
      nested("awareness.search_give_up", &AgentTuning::awareness, &AwarenessTuning::search_give_up),
      field("canvass.radius", &AgentTuning::canvass_radius),
      field("canvass.recency", &AgentTuning::canvass_recency),
      field("follow.replan_dist", &AgentTuning::follow_replan_dist),
      nested("follow.n_rays", &AgentTuning::follow, &FollowParams::n_rays),
      nested("follow.forward_len", &AgentTuning::follow, &FollowParams::forward_len),
      nested("follow.pullback", &AgentTuning::follow, &FollowParams::pullback),
      nested("follow.ideal_dist", &AgentTuning::follow_scoring, &FollowScoring::ideal_dist),
      nested("follow.w_close", &AgentTuning::follow_scoring, &FollowScoring::w_close),
      nested("follow.w_travel", &AgentTuning::follow_scoring, &FollowScoring::w_travel),
      nested("follow.w_behind", &AgentTuning::follow_scoring, &FollowScoring::w_behind),
      nested("teleport.min_ticks", &AgentTuning::teleport, &TeleportParams::min_ticks),
      nested("teleport.min_path", &AgentTuning::teleport, &TeleportParams::min_path),
      nested("posts.max_cover", &AgentTuning::posts, &PostsConfig::max_cover),
      nested("posts.max_open", &AgentTuning::posts, &PostsConfig::max_open),
      nested("posts.cover_radius", &AgentTuning::posts, &PostsConfig::cover_radius),
      nested("posts.open_r_min", &AgentTuning::posts, &PostsConfig::open_r_min),
      nested("posts.open_r_max", &AgentTuning::posts, &PostsConfig::open_r_max),
      nested("posts.exclusion_radius", &AgentTuning::posts, &PostsConfig::exclusion_radius),
      nested("posts.band_min", &AgentTuning::posts, &PostsConfig::band_min),
      nested("posts.band_max", &AgentTuning::posts, &PostsConfig::band_max),
      nested("posts.band_falloff", &AgentTuning::posts, &PostsConfig::band_falloff),
      nested("posts.ally_separation", &AgentTuning::posts, &PostsConfig::ally_separation),
      nested("posts.approach_scale", &AgentTuning::posts, &PostsConfig::approach_scale),
      nested("posts.exposure_offset", &AgentTuning::posts, &PostsConfig::exposure_offset),
      field("posts.recent_memory", &AgentTuning::recent_post_memory),
      nested("player.vision_range", &AgentTuning::player_vision, &InverseDistanceCone::r_max),
      field("sound.gunshot", &AgentTuning::gunshot_loudness),
      field("wander.radius", &AgentTuning::wander_radius),
      field("ambush.radius", &AgentTuning::ambush_radius),
      field("herd.radius", &AgentTuning::herd_radius),
      player_field("player.walk_speed", &PlayerTuning::walk_speed),
      player_field("player.sneak_speed", &PlayerTuning::sneak_speed),
      player_field("player.sprint_speed", &PlayerTuning::sprint_speed),
      player_field("player.walk_loudness", &PlayerTuning::walk_loudness),
      player_field("player.sneak_loudness", &PlayerTuning::sneak_loudness),
      player_field("player.sprint_loudness", &PlayerTuning::sprint_loudness),
      player_field("player.attack_range", &PlayerTuning::attack_range),
      player_field("sound.brick", &PlayerTuning::brick_loudness),
      player_field("player.brick_range", &PlayerTuning::brick_range),
      {"combat.ranged_hit_range", [](const SimConfig& c) { return c.ranged_hit_range; },
       [](SimConfig& c, double v) { c.ranged_hit_range = v; }, false},
      {"follow.r_min", [](const SimConfig& c) { return c.agent.follow.region.r_min; },
       [](SimConfig& c, double v) { c.agent.follow.region.r_min = v; }, false},
      {"follow.r_max", [](const SimConfig& c) { return c.agent.follow.region.r_max; },
       [](SimConfig& c, double v) { c.agent.follow.region.r_max = v; }, false},
      {"follow.arc_half_width", [](const SimConfig& c) { return c.agent.follow.region.arc_half_width; },
       [](SimConfig& c, double v) { c.agent.follow.region.arc_half_width = v; }, false},
      combat("hunter.clip", ArchetypeKind::Hunter, &CombatParams::clip),
      combat("hunter.reserve", ArchetypeKind::Hunter, &CombatParams::reserve),
      combat("hunter.reload_ticks", ArchetypeKind::Hunter, &CombatParams::reload_ticks),
      combat("hunter.fire_cooldown", ArchetypeKind::Hunter, &CombatParams::fire_cooldown),
      combat("bloater.throw_cooldown", ArchetypeKind::Bloater, &CombatParams::throw_cooldown),
      combat("bloater.throw_min", ArchetypeKind::Bloater, &CombatParams::throw_min),
      combat("bloater.throw_max", ArchetypeKind::Bloater, &CombatParams::throw_max),
  };

  for (const ArchetypeKind kind : kKinds) {
    const std::string prefix(to_string(kind));
    keys.push_back({prefix + ".speed", [kind](const SimConfig& c) { return c.archetype(kind).move_speed; },
                    [kind](SimConfig& c, double v) { c.archetype(kind).move_speed = v; }});
    keys.push_back({prefix + ".footstep", [kind](const SimConfig& c) { return c.archetype(kind).footstep_loudness; },
                    [kind](SimConfig& c, double v) { c.archetype(kind).footstep_loudness = v; }});
    keys.push_back({prefix + ".hearing_threshold",
                    [kind](const SimConfig& c) { return c.archetype(kind).hearing.threshold; },
                    [kind](SimConfig& c, double v) { c.archetype(kind).hearing.threshold = v; }});
    keys.push_back({prefix + ".hearing_occlusion",
                    [kind](const SimConfig& c) { return c.archetype(kind).hearing.occlusion_factor; },
                    [kind](SimConfig& c, double v) { c.archetype(kind).hearing.occlusion_factor = v; }});
    keys.push_back({prefix + ".vision_range",
                    [kind](const SimConfig& c) { return cone_of(c.archetype(kind))->r_max; },
                    [kind](SimConfig& c, double v) { cone_of(c.archetype(kind))->r_max = v; }});
    keys.push_back({prefix + ".vision_k", [kind](const SimConfig& c) { return cone_of(c.archetype(kind))->k; },
                    [kind](SimConfig& c, double v) { cone_of(c.archetype(kind))->k = v; }});
    keys.push_back({prefix + ".vision_theta_max",
                    [kind](const SimConfig& c) { return cone_of(c.archetype(kind))->theta_max; },
                    [kind](SimConfig& c, double v) { cone_of(c.archetype(kind))->theta_max = v; }});
    keys.push_back({prefix + ".melee_range",
                    [kind](const SimConfig& c) { return c.archetype(kind).combat.melee_range; },
                    [kind](SimConfig& c, double v) { c.archetype(kind).combat.melee_range = v; }});

    for (const SkillSpec& spec : archetype_defaults(kind).skills) {
      const SkillId id = spec.id;
      keys.push_back({"skill." + prefix + "." + std::string(to_string(id)),
                      [kind, id](const SimConfig& c) { return static_cast<double>(c.archetype(kind).skill(id)->priority); },
                      [kind, id](SimConfig& c, double v) {
                        Archetype& a = c.archetype(kind);
                        for (auto& s : a.skills)
                          if (s.id == id) s.priority = static_cast<int>(v);
                        a.sort_skills();
                      },
                      true});
    }
  }
  std::sort(keys.begin(), keys.end(), [](const ConfigKey& a, const ConfigKey& b) { return a.name < b.name; });
  return keys;
}

ArchetypeKind kind_for_glyph(char g, int line, int x, int y) {
  switch (g) {
    case 'R': return ArchetypeKind::Runner;
    case 'S': return ArchetypeKind::Stalker;
    case 'C': return ArchetypeKind::Clicker;
    case 'L': return ArchetypeKind::Bloater;
    case 'H': return ArchetypeKind::Hunter;
    case 'B': return ArchetypeKind::Buddy;
    default: break;
  }
  throw ScenarioError("unknown_archetype", line,
                      "unknown archetype glyph '" + std::string(1, g) + "' at (" + std::to_string(x) + "," +
                          std::to_string(y) + ")");
}

double radians(double degrees) { return degrees * kPi / 180.0; }

}  // namespace

char archetype_glyph(ArchetypeKind kind) {
  switch (kind) {
    case ArchetypeKind::Runner: return 'R';
    case ArchetypeKind::Stalker: return 'S';
    case ArchetypeKind::Clicker: return 'C';
    case ArchetypeKind::Bloater: return 'L';
    case ArchetypeKind::Hunter: return 'H';
    case ArchetypeKind::Buddy: return 'B';
  }
  return '?';
}

SimConfig default_config() {
  SimConfig c;
  for (const ArchetypeKind k : kKinds) c.archetype(k) = archetype_defaults(k);
  return c;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

const ConfigKey* find_config_key(std::string_view name) {
  const auto& keys = config_keys();
  const auto it = std::lower_bound(keys.begin(), keys.end(), name,
                                   [](const ConfigKey& k, std::string_view n) { return k.name < n; });
  return it != keys.end() && it->name == name ? &*it : nullptr;
}

void apply_config(SimConfig& config, const std::map<std::string, double>& values) {
  for (const auto& [name, value] : values) {
    const ConfigKey* key = find_config_key(name);
    if (!key) throw ScenarioError("unknown_key", 0, "unknown config key '" + name + "'");
    if (key->integral && value != std::floor(value))
      throw ScenarioError("bad_value", 0, "config key '" + name + "' needs an integer");
    key->set(config, value);
  }
  for (const ArchetypeKind k : kKinds)
    if (!config.archetype(k).priorities_well_formed())
      throw ScenarioError("bad_value", 0,
                          "skill priorities of '" + std::string(to_string(k)) + "' must be distinct");
}

Scenario load_scenario(std::string_view text) {
  Scenario sc;
  sc.text = std::string(text);

  struct HeaderSpawn {
    char glyph;
    Cell cell;
    double heading;
    int line;
  };
  std::vector<HeaderSpawn> header_spawns;
  std::map<int, std::pair<double, int>> headings;                 // agent id -> (degrees, line)
  std::map<int, std::pair<std::vector<Point>, int>> patrols;      // agent id -> (points, line)
  std::vector<std::string> rows;
  int map_line = 0;
  bool in_map = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (in_map) {
      if (trim(raw).empty()) continue;
      rows.push_back(std::string(trim(raw)));
      continue;
    }
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "map:") {
      in_map = true;
      map_line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ScenarioError("parse", line_no, "expected 'key = value' or 'map:'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw ScenarioError("bad_value", line_no, "seed must be an unsigned integer");
      sc.seed = seed;
    } else if (key == "tick_rate") {
      const auto v = parse_number(value);
      if (!v || *v <= 0.0) throw ScenarioError("bad_value", line_no, "tick_rate must be positive");
      sc.tick_rate = *v;
    } else if (key == "spawn") {
      const auto w = words(value);
      if (w.size() < 3 || w.size() > 4 || w[0].size() != 1)
        throw ScenarioError("parse", line_no, "spawn needs: <glyph> <x> <y> [heading]");
      const auto x = parse_number(w[1]), y = parse_number(w[2]);
      const auto h = w.size() == 4 ? parse_number(w[3]) : std::optional<double>(0.0);
      if (!x || !y || !h || *x != std::floor(*x) || *y != std::floor(*y))
        throw ScenarioError("bad_value", line_no, "spawn coordinates must be integer cells");
      header_spawns.push_back({w[0][0], {static_cast<int>(*x), static_cast<int>(*y)}, *h, line_no});
    } else if (key.rfind("agent.", 0) == 0) {
      const auto parts = split(key, '.');
      int id = 0;
      if (parts.size() != 3 ||
          std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), id).ec != std::errc() || id < 1)
        throw ScenarioError("unknown_key", line_no, "unknown key '" + key + "'");
      if (parts[2] == "heading") {
        const auto v = parse_number(value);
        if (!v) throw ScenarioError("bad_value", line_no, "heading must be a number of degrees");
        headings[id] = {*v, line_no};
      } else if (parts[2] == "patrol") {
        std::vector<Point> pts;
        for (const auto item : split(value, ';')) {
          const auto xy = split(item, ',');
          const auto px = xy.size() == 2 ? parse_number(xy[0]) : std::nullopt;
          const auto py = xy.size() == 2 ? parse_number(xy[1]) : std::nullopt;
          if (!px || !py) throw ScenarioError("bad_value", line_no, "patrol expects 'x,y; x,y; ...'");
          pts.push_back(cell_center({static_cast<int>(std::floor(*px)), static_cast<int>(std::floor(*py))}));
        }
        patrols[id] = {std::move(pts), line_no};
      } else {
        throw ScenarioError("unknown_key", line_no, "unknown key '" + key + "'");
      }
    } else {
      if (!find_config_key(key)) throw ScenarioError("unknown_key", line_no, "unknown config key '" + key + "'");
      const auto v = parse_number(value);
      if (!v) throw ScenarioError("bad_value", line_no, "value of '" + key + "' is not a number");
      sc.config[key] = *v;
    }
  }

  if (!in_map) throw ScenarioError("parse", line_no, "missing 'map:' block");
  if (rows.empty()) throw ScenarioError("parse", map_line, "empty map");
  const std::size_t width = rows.front().size();
  const int height = static_cast<int>(rows.size());
  std::vector<std::string> terrain(rows.size());
  std::optional<Pose> player;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int line = map_line + 1 + static_cast<int>(r);
    if (rows[r].size() != width) throw ScenarioError("parse", line, "map rows must have equal length");
    terrain[r] = rows[r];
    const int y = height - 1 - static_cast<int>(r);
    for (std::size_t x = 0; x < width; ++x) {
      const char g = rows[r][x];
      if (g == '#' || g == '~' || g == '.') continue;
      terrain[r][x] = '.';
      const Point center = cell_center({static_cast<int>(x), y});
      if (g == 'P') {
        if (player) throw ScenarioError("parse", line, "more than one player spawn");
        player = Pose(center, 0.0);
        continue;
      }
      sc.agents.push_back({kind_for_glyph(g, line, static_cast<int>(x), y), Pose(center, 0.0), {}});
    }
  }
  try {
    sc.map = map_from_rows(terrain);
  } catch (const std::exception& e) {
    throw ScenarioError("parse", map_line, e.what());
  }

  for (const HeaderSpawn& h : header_spawns) {
    const std::string at = "(" + std::to_string(h.cell.x) + "," + std::to_string(h.cell.y) + ")";
    if (!sc.map.in_bounds(h.cell) || sc.map.at(h.cell) == CellKind::Wall)
      throw ScenarioError("spawn_blocked", h.line, "spawn on blocked cell " + at);
    const Pose pose(cell_center(h.cell), radians(h.heading));
    if (h.glyph == 'P') {
      if (player) throw ScenarioError("parse", h.line, "more than one player spawn");
      player = pose;
      continue;
    }
    sc.agents.push_back({kind_for_glyph(h.glyph, h.line, h.cell.x, h.cell.y), pose, {}});
  }
  if (!player) throw ScenarioError("parse", 0, "scenario has no player spawn 'P'");
  sc.player_spawn = *player;

  for (const auto& [id, hl] : headings) {
    if (id > static_cast<int>(sc.agents.size()))
      throw ScenarioError("bad_value", hl.second, "no agent with id " + std::to_string(id));
    sc.agents[id - 1].pose = Pose(sc.agents[id - 1].pose.position, radians(hl.first));
  }
  for (auto& [id, pl] : patrols) {
    if (id > static_cast<int>(sc.agents.size()))
      throw ScenarioError("bad_value", pl.second, "no agent with id " + std::to_string(id));
    for (const Point p : pl.first)
      if (!sc.map.passable(cell_of(p)))
        throw ScenarioError("bad_value", pl.second, "patrol point on blocked cell");
    sc.agents[id - 1].patrol = std::move(pl.first);
  }

  // Config values are validated now so errors surface at load time.
  SimConfig probe = default_config();
  try {
    apply_config(probe, sc.config);
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.code(), 0, e.what());
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ScenarioError("io", 0, "cannot read scenario '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_scenario(ss.str());
}

SimConfig resolve_config(const Scenario& scenario, const std::map<std::string, double>& overrides) {
  SimConfig c = default_config();
  std::map<std::string, double> merged = scenario.config;
  for (const auto& [k, v] : overrides) merged[k] = v;
  apply_config(c, merged);
  return c;
}

}  // namespace stealth
