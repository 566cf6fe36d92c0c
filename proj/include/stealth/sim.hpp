#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stealth/agents.hpp"
#include "stealth/scenario.hpp"

namespace stealth {

enum class Stance : std::uint8_t { Walk, Sneak, Sprint };
enum class PlayerActionKind : std::uint8_t { None, ThrowBrick, Attack };

std::string_view to_string(Stance s);
std::optional<Stance> stance_from_string(std::string_view s);

struct PlayerInput {
  Point move;  // |move| <= 1; longer vectors are scaled down
  Stance stance = Stance::Walk;
  PlayerActionKind action = PlayerActionKind::None;
  Point throw_target;
  int attack_target = -1;
  friend bool operator==(const PlayerInput&, const PlayerInput&) = default;
};

/// Everything recorded about one agent at the end of a tick.
struct AgentRecord {
  int id = 0;
  std::string kind;  // archetype name, or "player"
  Pose pose;
  bool alive = true;
  AwarenessPhase phase = AwarenessPhase::Unaware;
  std::optional<Point> focus;
  std::optional<SkillId> skill;
  std::vector<BehaviourId> stack;
  SkillContext context;
  int post_id = -1;
  int post_rays = 0;
  int post_count = 0;
  int follow_candidates = 0;  // Accepted candidates of the latest plan
  int follow_usable = 0;
  bool follow_replanned = false;
  int canvass_unseen = -1;  // -1 when no canvass is running
  int canvass_initial = 0;
  int canvass_epoch = 0;
  bool teleported = false;
  std::uint64_t rng_draws = 0;  // cumulative for this agent
};

struct TickRecord {
  std::int64_t tick = 0;  // the tick that was just simulated, starting at 0
  PlayerInput input;
  std::vector<AgentRecord> agents;
  std::vector<SoundEvent> sounds;  // emitted this tick, heard next tick
  std::uint64_t rng_draws = 0;     // draws consumed during this tick
  int player_hits = 0;             // cumulative
  int teleports = 0;               // cumulative
};

struct SimState {
  std::int64_t tick = 0;
  std::vector<AgentState> agents;  // index = id; 0 is the player
  std::vector<SoundEvent> pending_sounds;
  int player_hits = 0;
  int teleports = 0;
};

/// One deterministic world. step() follows a fixed phase order: player input
/// and its sounds; perception (sight now, sounds from the previous tick);
/// awareness, skill selection and behaviours in id order; action resolution
/// (movement without wall clipping, attacks, sounds, teleports last); record.
class Simulation {
 public:
  Simulation(const Scenario& scenario, const std::map<std::string, double>& overrides = {});
  Simulation(const Scenario& scenario, std::uint64_t seed, const std::map<std::string, double>& overrides = {});

  TickRecord step(const PlayerInput& input);

  const SimState& state() const { return state_; }
  const GridMap& map() const { return map_; }
  const SimConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  /// Resets to tick 0 with a (possibly new) seed.
  void reset(std::uint64_t seed);

 private:
  void init();
  Point resolve_move(Point from, Point delta) const;
  double player_speed(Stance s) const;
  double player_loudness(Stance s) const;

  Scenario scenario_;
  GridMap map_;
  SimConfig config_;
  std::uint64_t seed_ = 0;
  SimState state_;
};

AgentRecord record_agent(const AgentState& a);

/// Moves never enter a wall or cross one; when the straight move fails the
/// x-only and y-only components are tried in that order.
Point resolve_move(const GridMap& map, Point from, Point delta);

/// Input script lines: `[N*] dx dy stance [throw x y | attack id]`; '#' starts a comment.
std::vector<PlayerInput> parse_script(std::string_view text);
std::vector<PlayerInput> load_script_file(const std::string& path);

struct HeadlessRun {
  std::vector<TickRecord> records;
};

/// Runs max_ticks ticks (or the script length when max_ticks is 0), padding
/// the script with empty input.
HeadlessRun run_headless(const Scenario& scenario, const std::vector<PlayerInput>& script, std::int64_t max_ticks,
                         std::optional<std::uint64_t> seed = std::nullopt,
                         const std::map<std::string, double>& overrides = {});

}  // namespace stealth
