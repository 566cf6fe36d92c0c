#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stealth/canvass.hpp"
#include "stealth/follow.hpp"
#include "stealth/perception.hpp"
#include "stealth/posts.hpp"
#include "stealth/rng.hpp"
#include "stealth/world.hpp"

namespace stealth {

enum class SkillId : std::uint8_t {
  Chase, Search, Follow, Sleep, Wander, Ambush, Throw,
  Panic, Advance, Melee, GunCombat, Hide, Investigate, Scripted, Flank
};
inline constexpr std::size_t kSkillCount = 15;

enum class BehaviourId : std::uint8_t {
  MoveToLocation, StandAndShoot, TakeCover, Canvass, FollowPlayer,
  WanderStep, AmbushWait, ThrowProjectile, Idle
};

enum class ArchetypeKind : std::uint8_t { Runner, Stalker, Clicker, Bloater, Hunter, Buddy };

std::string_view to_string(SkillId id);
std::string_view to_string(BehaviourId id);
std::string_view to_string(ArchetypeKind kind);
std::optional<SkillId> skill_from_string(std::string_view name);
std::optional<ArchetypeKind> archetype_from_string(std::string_view name);

constexpr bool is_infected(ArchetypeKind k) {
  return k == ArchetypeKind::Runner || k == ArchetypeKind::Stalker || k == ArchetypeKind::Clicker ||
         k == ArchetypeKind::Bloater;
}

/// Facts a skill's validity predicate may consult. Recorded in the trace each
/// tick so the priority audit can re-evaluate every predicate offline.
struct SkillContext {
  AwarenessPhase phase = AwarenessPhase::Unaware;
  bool player_visible = false;
  bool in_melee_range = false;
  bool throw_in_band = false;
  bool throw_ready = false;
  bool armed = true;       // rounds left in clip or reserve
  bool reloading = false;
  bool flank_better = false;
  bool has_script = false;
  bool resting = false;
  bool cover_nearby = false;
  bool ally_chasing = false;
  bool enemy_alert = false;
  friend bool operator==(const SkillContext&, const SkillContext&) = default;
};

enum class SkillCondition : std::uint8_t {
  Always,
  Alert,              // phase Alert
  LostTrack,          // phase Suspicious or Searching
  HerdFollow,         // Unaware and a nearby infected is chasing
  Roam,               // Unaware and not resting
  AmbushReady,        // lost track with cover nearby
  ThrowReady,         // Alert, player visible, in throw band, cooldown elapsed
  Unarmed,            // Alert with no rounds left
  MeleeRange,         // Alert, player visible and within reach
  LineOfFire,         // Alert, armed, not reloading, player visible
  FlankOpening,       // Alert, armed, not reloading, flank post outranks frontal
  Engaged,            // Alert, armed, not reloading
  Reloading,          // Alert and reloading
  EnemyAlert,         // some enemy is Alert (buddy)
  ScriptPending,      // Unaware with scripted waypoints
};

bool condition_holds(SkillCondition c, const SkillContext& ctx);

struct SkillSpec {
  SkillId id;
  int priority;  // higher interrupts lower
  SkillCondition validity;
};

struct CombatParams {
  int clip = 6;
  int reserve = 18;
  int reload_ticks = 20;
  int fire_cooldown = 5;
  double melee_range = 1.2;
  int throw_cooldown = 40;
  double throw_min = 2.0;
  double throw_max = 8.0;
};

struct Archetype {
  ArchetypeKind kind = ArchetypeKind::Runner;
  std::vector<SkillSpec> skills;  // highest priority first
  VisionModel vision;
  HearingModel hearing;
  double move_speed = 0.3;
  double footstep_loudness = 2.0;
  std::vector<MotionPrimitive> primitives;
  CombatParams combat;

  bool has_skill(SkillId id) const;
  const SkillSpec* skill(SkillId id) const;
  /// Strictly distinct priorities, sorted descending.
  bool priorities_well_formed() const;
  void sort_skills();
};

/// The declared default table (see src/archetype_table.cpp).
Archetype archetype_defaults(ArchetypeKind kind);

/// Highest-priority skill whose predicate holds. Every default archetype has
/// an always-valid floor, so this is total for them.
SkillId select_skill(const Archetype& archetype, const SkillContext& ctx);

/// Behaviour a skill pushes over Idle when it becomes active (Idle for Sleep).
BehaviourId root_behaviour(SkillId skill, ArchetypeKind kind);

/// What a MoveToLocation frame is steering at; resolved afresh every tick.
enum class MoveGoal : std::uint8_t { Fixed, Focus, Player, HeldPost, FollowTarget, Patrol };

struct BehaviourFrame {
  BehaviourId id = BehaviourId::Idle;
  MoveGoal goal = MoveGoal::Fixed;
  Point target;
  int mode = 0;
  bool flag = false;
  bool avoid_player = false;
  bool melee = false;
};

/// Never empty: the bottom frame is always Idle and cannot be popped.
class BehaviourStack {
 public:
  static constexpr std::size_t kMaxDepth = 4;

  BehaviourStack() { frames_.push_back({}); }

  void push(const BehaviourFrame& f);
  void pop();
  void truncate(std::size_t depth);
  void clear_to_idle() { truncate(1); }

  BehaviourFrame& top() { return frames_.back(); }
  const BehaviourFrame& top() const { return frames_.back(); }
  BehaviourFrame& at(std::size_t i) { return frames_.at(i); }
  std::size_t depth() const { return frames_.size(); }
  std::span<const BehaviourFrame> frames() const { return frames_; }
  std::vector<BehaviourId> ids() const;

 private:
  std::vector<BehaviourFrame> frames_;
};

enum class AttackKind : std::uint8_t { None, Melee, Ranged, Throw };

struct AgentAction {
  Point move_intent;            // units per tick, |v| <= move speed
  std::optional<double> face;   // heading to take after moving
  std::optional<double> emit_sound;
  AttackKind attack = AttackKind::None;
  Point attack_target;
  std::optional<Point> teleport_to;
};

struct AgentTuning {
  AwarenessTuning awareness;
  double canvass_radius = 10.0;
  std::size_t canvass_recency = 3;
  FollowParams follow;
  FollowScoring follow_scoring;
  double follow_replan_dist = 1.0;
  TeleportParams teleport;
  PostsConfig posts;
  std::size_t recent_post_memory = 3;
  InverseDistanceCone player_vision{kPi / 2.0, kPi / 2.0, 20.0, 1.0};
  double gunshot_loudness = 30.0;
  double throw_loudness = 8.0;
  double wander_radius = 4.0;
  double ambush_radius = 3.0;
  double herd_radius = 5.0;
};

struct CanvassMemory {
  CanvassGrid grid;
  RecencyBuffer recency;
  Point focus;
  std::optional<CanvassChoice> pending;
  Pose pending_from;
  int pending_ticks = 0;
  int steps = 0;
  bool stalled = false;
  std::vector<Cell> last_wedge;
};

struct FollowMemory {
  std::optional<Point> anchor;
  std::optional<Point> target;
  int usable = 0;
  int ticks_without = 0;
  bool replanned = false;
  std::optional<Point> pending_teleport;
  std::vector<FollowCandidate> candidates;
};

struct PostMemory {
  std::optional<Cell> held;
  int chosen_id = -1;
  std::deque<Cell> recent;
  int rays_this_tick = 0;
  std::string selector;
  std::vector<EvaluatedPost> posts;
  std::vector<PostRating> ratings;
};

struct AgentState {
  int id = 0;
  bool is_player = false;
  Archetype archetype;
  Pose pose;
  bool alive = true;
  AwarenessState awareness;
  std::optional<SkillId> skill;
  BehaviourStack stack;
  SkillContext last_context;

  // path following
  std::vector<Point> path;
  std::size_t path_index = 0;
  Point path_goal;
  int path_age = 0;

  std::optional<CanvassMemory> canvass;
  int canvass_epoch = 0;
  FollowMemory follow;
  PostMemory posts;

  int clip = 0;
  int reserve = 0;
  int reload_left = 0;
  int fire_cooldown = 0;
  int throw_cooldown = 0;
  int shots_fired = 0;

  int rest_ticks = 0;
  int wander_legs = 0;

  std::vector<Point> patrol;
  std::size_t patrol_index = 0;

  SplitMix64 rng;
  bool teleported = false;
};

AgentState make_agent(int id, const Archetype& archetype, const Pose& spawn, std::uint64_t seed);
AgentState make_player(const Pose& spawn);

/// Read-only view of the world an agent reasons over during one tick.
struct AgentWorld {
  const GridMap* map = nullptr;
  std::int64_t tick = 0;
  const AgentTuning* tuning = nullptr;
  Pose player;
  std::span<const AgentState> agents;  // everyone, as of the start of the tick
  std::vector<Cell>* claimed_posts = nullptr;  // cells other agents already hold this tick
};

/// One decision tick: awareness update, post evaluation (hunters), skill
/// selection and one step of the active behaviour.
AgentAction tick_agent(AgentState& agent, const AgentWorld& world, std::span<const Percept> percepts);

/// Enemies (and the player) that could notice the buddy.
std::vector<Observer> observers_of_buddy(const AgentWorld& world);

/// Is a free cell orthogonally next to cover within `radius` of p?
std::optional<Cell> nearest_cover_spot(const GridMap& map, Point p, double radius);

}  // namespace stealth
