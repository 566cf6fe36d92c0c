#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stealth/agents.hpp"
#include "stealth/world.hpp"

namespace stealth {

/// Player movement and noise per stance, plus the player's own actions.
struct PlayerTuning {
  double walk_speed = 0.3;
  double sneak_speed = 0.15;
  double sprint_speed = 0.5;
  double walk_loudness = 3.0;
  double sneak_loudness = 1.0;
  double sprint_loudness = 10.0;
  double attack_range = 1.5;
  double brick_loudness = 8.0;
  double brick_range = 10.0;
};

/// Every tunable the engine reads. Scenario `key = value` lines and
/// `--config` overrides land here through the key registry.
struct SimConfig {
  AgentTuning agent;
  PlayerTuning player;
  std::array<Archetype, 6> archetypes;
  double ranged_hit_range = 8.0;

  const Archetype& archetype(ArchetypeKind k) const { return archetypes[static_cast<std::size_t>(k)]; }
  Archetype& archetype(ArchetypeKind k) { return archetypes[static_cast<std::size_t>(k)]; }
};

SimConfig default_config();

struct ConfigKey {
  std::string name;
  std::function<double(const SimConfig&)> get;
  std::function<void(SimConfig&, double)> set;
  bool integral = false;
};

/// All recognised numeric keys, sorted by name. Skill priorities use the
/// pattern skill.<archetype>.<skill> and are listed too.
const std::vector<ConfigKey>& config_keys();
const ConfigKey* find_config_key(std::string_view name);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string code, int line, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), line_(line) {}
  const std::string& code() const { return code_; }
  int line() const { return line_; }  // 0 when not tied to a line

 private:
  std::string code_;
  int line_;
};

/// Applies overrides in key order; throws ScenarioError("unknown_key" | "bad_value").
void apply_config(SimConfig& config, const std::map<std::string, double>& values);

struct AgentSpawn {
  ArchetypeKind kind = ArchetypeKind::Runner;
  Pose pose;
  std::vector<Point> patrol;
};

struct Scenario {
  std::string text;  // the source document, verbatim
  GridMap map;
  Pose player_spawn;
  std::vector<AgentSpawn> agents;  // NPC ids are 1..n in this order
  std::uint64_t seed = 0;
  double tick_rate = 10.0;
  std::map<std::string, double> config;  // explicit settings from the document
};

/// Parses a scenario document:
///
///   # comment
///   seed = 7
///   posts.max_cover = 20
///   spawn = H 4 5 90          (glyph, cell x, cell y, optional heading in degrees)
///   agent.1.heading = 180
///   agent.2.patrol = 3,4; 10,4
///   map:
///   #########
///   #P..~..H#
///   #########
///
/// The top map row is the northern edge. NPC ids follow reading order of the
/// map glyphs, then header spawns. Headings are degrees counter-clockwise
/// from +x (east).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Scenario defaults, then the document's settings, then the overrides.
SimConfig resolve_config(const Scenario& scenario, const std::map<std::string, double>& overrides = {});

char archetype_glyph(ArchetypeKind kind);

}  // namespace stealth
