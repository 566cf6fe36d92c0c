// Declared archetype table: skill sets, priorities, validity predicates and
// perception/movement parameters. Tuning lives here, not in the engine.

#include <algorithm>
#include <stdexcept>

#include "stealth/agents.hpp"

namespace stealth {

namespace {

constexpr std::array<std::string_view, kSkillCount> kSkillNames = {
    "chase", "search", "follow", "sleep", "wander", "ambush", "throw", "panic",
    "advance", "melee", "gun_combat", "hide", "investigate", "scripted", "flank"};

constexpr std::array<std::string_view, 6> kArchetypeNames = {"runner", "stalker", "clicker",
                                                             "bloater", "hunter", "buddy"};

std::vector<SkillSpec> infected_skills() {
  return {
      {SkillId::Chase, 50, SkillCondition::Alert},
      {SkillId::Search, 40, SkillCondition::LostTrack},
      {SkillId::Follow, 30, SkillCondition::HerdFollow},
      {SkillId::Wander, 20, SkillCondition::Roam},
      {SkillId::Sleep, 10, SkillCondition::Always},
  };
}

InverseDistanceCone cone(double r_max) { return {kPi / 2.0, kPi / 2.0, r_max, 1.0}; }

}  // namespace

std::string_view to_string(SkillId id) { return kSkillNames[static_cast<std::size_t>(id)]; }

std::string_view to_string(ArchetypeKind kind) {
  return kArchetypeNames[static_cast<std::size_t>(kind)];
}

std::string_view to_string(BehaviourId id) {
  switch (id) {
    case BehaviourId::MoveToLocation: return "move_to_location";
    case BehaviourId::StandAndShoot: return "stand_and_shoot";
    case BehaviourId::TakeCover: return "take_cover";
    case BehaviourId::Canvass: return "canvass";
    case BehaviourId::FollowPlayer: return "follow_player";
    case BehaviourId::WanderStep: return "wander_step";
    case BehaviourId::AmbushWait: return "ambush_wait";
    case BehaviourId::ThrowProjectile: return "throw_projectile";
    case BehaviourId::Idle: return "idle";
  }
  return "idle";
}

std::optional<SkillId> skill_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSkillNames.size(); ++i)
    if (kSkillNames[i] == name) return static_cast<SkillId>(i);
  return std::nullopt;
}

std::optional<ArchetypeKind> archetype_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kArchetypeNames.size(); ++i)
    if (kArchetypeNames[i] == name) return static_cast<ArchetypeKind>(i);
  return std::nullopt;
}

bool condition_holds(SkillCondition c, const SkillContext& x) {
  const bool alert = x.phase == AwarenessPhase::Alert;
  const bool lost = x.phase == AwarenessPhase::Suspicious || x.phase == AwarenessPhase::Searching;
  const bool unaware = x.phase == AwarenessPhase::Unaware;
  switch (c) {
    case SkillCondition::Always: return true;
    case SkillCondition::Alert: return alert;
    case SkillCondition::LostTrack: return lost;
    case SkillCondition::HerdFollow: return unaware && x.ally_chasing;
    case SkillCondition::Roam: return unaware && !x.resting;
    case SkillCondition::AmbushReady: return lost && x.cover_nearby;
    case SkillCondition::ThrowReady: return alert && x.player_visible && x.throw_in_band && x.throw_ready;
    case SkillCondition::Unarmed: return alert && !x.armed;
    case SkillCondition::MeleeRange: return alert && x.player_visible && x.in_melee_range;
    case SkillCondition::LineOfFire: return alert && x.armed && !x.reloading && x.player_visible;
    case SkillCondition::FlankOpening: return alert && x.armed && !x.reloading && x.flank_better;
    case SkillCondition::Engaged: return alert && x.armed && !x.reloading;
    case SkillCondition::Reloading: return alert && x.reloading;
    case SkillCondition::EnemyAlert: return x.enemy_alert;
    case SkillCondition::ScriptPending: return unaware && x.has_script;
  }
  return false;
}

bool Archetype::has_skill(SkillId id) const { return skill(id) != nullptr; }

const SkillSpec* Archetype::skill(SkillId id) const {
  for (const auto& s : skills)
    if (s.id == id) return &s;
  return nullptr;
}

void Archetype::sort_skills() {
  std::stable_sort(skills.begin(), skills.end(),
                   [](const SkillSpec& a, const SkillSpec& b) { return a.priority > b.priority; });
}

bool Archetype::priorities_well_formed() const {
  for (std::size_t i = 1; i < skills.size(); ++i)
    if (!(skills[i - 1].priority > skills[i].priority)) return false;
  return !skills.empty();
}

Archetype archetype_defaults(ArchetypeKind kind) {
  Archetype a;
  a.kind = kind;
  switch (kind) {
    case ArchetypeKind::Runner:
      a.skills = infected_skills();
      a.vision = cone(6.0);
      a.hearing = {0.6, 0.5};
      a.move_speed = 0.35;
      break;
    case ArchetypeKind::Stalker:
      a.skills = infected_skills();
      a.skills.push_back({SkillId::Ambush, 45, SkillCondition::AmbushReady});
      a.vision = cone(6.0);
      a.hearing = {0.6, 0.5};
      a.move_speed = 0.3;
      a.footstep_loudness = 1.0;
      break;
    case ArchetypeKind::Clicker:
      a.skills = infected_skills();
      a.vision = InverseDistanceCone{kPi / 2.0, kPi / 2.0, 0.0, 1.0};  // sightless
      a.hearing = {0.5, 0.5};
      a.move_speed = 0.25;
      break;
    case ArchetypeKind::Bloater:
      a.skills = infected_skills();
      a.skills.push_back({SkillId::Throw, 60, SkillCondition::ThrowReady});
      a.vision = cone(6.0);
      a.hearing = {0.6, 0.5};
      a.move_speed = 0.15;
      a.footstep_loudness = 3.0;
      break;
    case ArchetypeKind::Hunter:
      a.skills = {
          {SkillId::Scripted, 80, SkillCondition::ScriptPending},
          {SkillId::Panic, 70, SkillCondition::Unarmed},
          {SkillId::Melee, 60, SkillCondition::MeleeRange},
          {SkillId::GunCombat, 50, SkillCondition::LineOfFire},
          {SkillId::Flank, 40, SkillCondition::FlankOpening},
          {SkillId::Advance, 30, SkillCondition::Engaged},
          {SkillId::Hide, 20, SkillCondition::Reloading},
          {SkillId::Investigate, 10, SkillCondition::Always},
      };
      a.vision = cone(12.0);
      a.hearing = {1.0, 0.5};
      a.move_speed = 0.3;
      a.footstep_loudness = 2.5;
      break;
    case ArchetypeKind::Buddy:
      a.skills = {
          {SkillId::Scripted, 30, SkillCondition::ScriptPending},
          {SkillId::Hide, 20, SkillCondition::EnemyAlert},
          {SkillId::Follow, 10, SkillCondition::Always},
      };
      a.vision = cone(12.0);
      a.hearing = {1.0, 0.5};
      a.move_speed = 0.45;
      a.footstep_loudness = 1.0;
      break;
  }
  if (is_infected(kind)) a.primitives = default_primitives();
  a.sort_skills();
  return a;
}

SkillId select_skill(const Archetype& archetype, const SkillContext& ctx) {
  for (const auto& s : archetype.skills)
    if (condition_holds(s.validity, ctx)) return s.id;
  throw std::logic_error("archetype has no valid skill; a floor skill is required");
}

BehaviourId root_behaviour(SkillId skill, ArchetypeKind kind) {
  switch (skill) {
    case SkillId::Chase: return BehaviourId::MoveToLocation;
    case SkillId::Search: return BehaviourId::Canvass;
    case SkillId::Follow:
      return kind == ArchetypeKind::Buddy ? BehaviourId::FollowPlayer : BehaviourId::MoveToLocation;
    case SkillId::Sleep: return BehaviourId::Idle;
    case SkillId::Wander: return BehaviourId::WanderStep;
    case SkillId::Ambush: return BehaviourId::AmbushWait;
    case SkillId::Throw: return BehaviourId::ThrowProjectile;
    case SkillId::Panic: return BehaviourId::MoveToLocation;
    case SkillId::Advance: return BehaviourId::TakeCover;
    case SkillId::Melee: return BehaviourId::MoveToLocation;
    case SkillId::GunCombat: return BehaviourId::TakeCover;
    case SkillId::Hide: return BehaviourId::TakeCover;
    case SkillId::Investigate: return BehaviourId::MoveToLocation;
    case SkillId::Scripted: return BehaviourId::MoveToLocation;
    case SkillId::Flank: return BehaviourId::TakeCover;
  }
  return BehaviourId::Idle;
}

}  // namespace stealth
