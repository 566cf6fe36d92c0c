#include "stealth/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stealth/kernels.hpp"

namespace stealth {

namespace {

constexpr double kArrive = 0.05;        // close enough to a move goal to call it reached
constexpr double kRepathShift = 0.5;    // goal drift that forces a new path
constexpr int kRepathAge = 30;          // ticks before a path is refreshed anyway
constexpr int kMaxTransitions = 6;      // push/pop rounds allowed within one tick
constexpr double kCanvassRestart = 2.0; // focus jump that restarts a canvass
constexpr double kScanTurn = 0.15;      // radians per tick while looking around

enum class Step { Acted, Changed };

struct TickScratch {
  AgentState& agent;
  const AgentWorld& world;
  const AgentTuning& tuning;
  SkillContext ctx;
  Point threat;
  AgentAction action;
  std::optional<SelectionContext> post_ctx;  // filled by the post evaluation pass
};

const char* selector_for(SkillId skill) {
  switch (skill) {
    case SkillId::GunCombat: return "take-cover";
    case SkillId::Flank: return "flank";
    case SkillId::Advance: return "advance";
    case SkillId::Hide: return "hide";
    default: return "investigate";
  }
}

bool uses_posts(const AgentState& a) { return a.archetype.kind == ArchetypeKind::Hunter; }

// ---------------------------------------------------------------- movement

Point goal_point(const TickScratch& s, const BehaviourFrame& f) {
  const AgentState& a = s.agent;
  switch (f.goal) {
    case MoveGoal::Fixed: return f.target;
    case MoveGoal::Focus: return a.awareness.focus.value_or(f.target);
    case MoveGoal::Player: return s.world.player.position;
    case MoveGoal::HeldPost: return a.posts.held ? cell_center(*a.posts.held) : f.target;
    case MoveGoal::FollowTarget: return a.follow.target.value_or(a.pose.position);
    case MoveGoal::Patrol:
      return a.patrol.empty() ? f.target : a.patrol[a.patrol_index % a.patrol.size()];
  }
  return f.target;
}

bool plan_path(TickScratch& s, Point goal, bool avoid_player) {
  AgentState& a = s.agent;
  const GridMap& map = *s.world.map;
  PathResult p;
  if (avoid_player) {
    p = find_path(map, a.pose.position, goal,
                  near_player_mask(map, s.world.player.position, s.tuning.posts.exclusion_radius));
  }
  if (!p.found()) p = find_path(map, a.pose.position, goal);
  a.path_goal = goal;
  a.path_age = 0;
  a.path.clear();
  a.path_index = 0;
  if (!p.found()) return false;
  a.path = std::move(p.waypoints);
  // Skip the start cell's center and end exactly on the goal, which lies in the last cell.
  a.path.back() = goal;
  a.path_index = a.path.size() > 1 ? 1 : 0;
  return true;
}

/// Advances along the cached path by at most the archetype speed.
bool steer_to(TickScratch& s, Point goal, bool avoid_player) {
  AgentState& a = s.agent;
  const bool stale = a.path.empty() || distance(a.path_goal, goal) > kRepathShift ||
                     a.path_age >= kRepathAge;
  if (stale && !plan_path(s, goal, avoid_player)) return false;
  if (!stale) {
    ++a.path_age;
    a.path.back() = goal;
  }

  Point pos = a.pose.position;
  double budget = a.archetype.move_speed;
  while (budget > 0.0 && a.path_index < a.path.size()) {
    const Point wp = a.path[a.path_index];
    const double d = distance(pos, wp);
    if (d <= budget) {
      pos = wp;
      budget -= d;
      ++a.path_index;
    } else {
      pos = pos + (wp - pos) * (budget / d);
      budget = 0.0;
    }
  }
  const Point delta = pos - a.pose.position;
  s.action.move_intent = delta;
  if (length(delta) > 0.0) {
    s.action.face = bearing_to(a.pose.position, pos);
    s.action.emit_sound = a.archetype.footstep_loudness;
  }
  return true;
}

void face_point(TickScratch& s, Point p) {
  if (distance(p, s.agent.pose.position) > 1e-9) s.action.face = bearing_to(s.agent.pose.position, p);
}

void try_melee(TickScratch& s) {
  if (s.ctx.player_visible && s.ctx.in_melee_range) {
    s.action.attack = AttackKind::Melee;
    s.action.attack_target = s.world.player.position;
  }
}

// ------------------------------------------------------------ posts (hunter)

void evaluate_posts(TickScratch& s) {
  AgentState& a = s.agent;
  const GridMap& map = *s.world.map;
  SelectionContext ctx = make_context(map, a.pose, s.world.player, s.tuning.posts);
  ctx.threat = s.threat;
  // The post being held is not "recently used" from its holder's point of view.
  for (const Cell c : a.posts.recent)
    if (c != a.posts.held) ctx.recent_posts.push_back(c);
  for (const AgentState& o : s.world.agents)
    if (o.id != a.id && o.alive && !o.is_player && o.archetype.kind == ArchetypeKind::Hunter)
      ctx.allies.push_back(o.pose.position);
  prepare_paths(ctx);

  const std::vector<Post> posts = generate_posts(map, ctx);
  a.posts.posts = kernels::validate_posts(map, posts, ctx);
  a.posts.rays_this_tick = static_cast<int>(posts.size()) * kRaysPerPost;
  a.posts.ratings.clear();

  if (s.ctx.phase == AwarenessPhase::Alert) {
    const auto frontal = rate_posts(*find_selector("take-cover"), a.posts.posts, ctx);
    const auto flank = rate_posts(*find_selector("flank"), a.posts.posts, ctx);
    const double best_frontal = frontal.empty() ? 0.0 : frontal.front().rating;
    const double best_flank = flank.empty() ? 0.0 : flank.front().rating;
    s.ctx.flank_better = best_flank > best_frontal;
  }
  a.posts.selector.clear();
  s.post_ctx = std::move(ctx);
}

const EvaluatedPost* post_by_cell(const AgentState& a, Cell c) {
  for (const auto& p : a.posts.posts)
    if (p.post.cell == c) return &p;
  return nullptr;
}

const EvaluatedPost* post_by_id(const AgentState& a, int id) {
  for (const auto& p : a.posts.posts)
    if (p.post.id == id) return &p;
  return nullptr;
}

bool claimed(const AgentWorld& w, Cell c) {
  return w.claimed_posts &&
         std::find(w.claimed_posts->begin(), w.claimed_posts->end(), c) != w.claimed_posts->end();
}

/// Rates posts for the active selector and keeps, replaces or drops the held post.
/// Returns true when the held post changed.
bool refresh_held_post(TickScratch& s, SkillId skill) {
  AgentState& a = s.agent;
  const std::optional<Cell> before = a.posts.held;
  if (!s.post_ctx) {
    a.posts.held.reset();
    a.posts.chosen_id = -1;
    return before.has_value();
  }
  a.posts.selector = selector_for(skill);
  a.posts.ratings = rate_posts(*find_selector(a.posts.selector), a.posts.posts, *s.post_ctx);

  std::vector<int> excluded;
  for (const auto& p : a.posts.posts)
    if (claimed(s.world, p.post.cell)) excluded.push_back(p.post.id);

  std::optional<int> keep;
  if (a.posts.held) {
    const EvaluatedPost* cur = post_by_cell(a, *a.posts.held);
    if (cur && !claimed(s.world, cur->post.cell)) {
      const double top = a.posts.ratings.empty() ? 0.0 : a.posts.ratings.front().rating;
      for (const auto& r : a.posts.ratings)
        if (r.post_id == cur->post.id && r.rating > 0.0 && r.rating >= 0.5 * top) keep = r.post_id;
    }
  }
  const std::optional<int> chosen = keep ? keep : select_post(a.posts.ratings, excluded);
  if (chosen) {
    const EvaluatedPost* p = post_by_id(a, *chosen);
    a.posts.held = p->post.cell;
    a.posts.chosen_id = *chosen;
    if (s.world.claimed_posts) s.world.claimed_posts->push_back(p->post.cell);
  } else {
    a.posts.held.reset();
    a.posts.chosen_id = -1;
  }
  if (a.posts.held != before && a.posts.held) {
    a.posts.recent.push_back(*a.posts.held);
    while (a.posts.recent.size() > s.tuning.recent_post_memory) a.posts.recent.pop_front();
  }
  return a.posts.held != before;
}

// --------------------------------------------------------------- follow

void follow_upkeep(TickScratch& s) {
  AgentState& a = s.agent;
  FollowMemory& m = a.follow;
  const GridMap& map = *s.world.map;
  const Pose& player = s.world.player;
  const auto& fp = s.tuning.follow;
  m.replanned = false;

  const bool moved = !m.anchor || distance(player.position, *m.anchor) > s.tuning.follow_replan_dist;
  const bool broken = m.target && !follow_contracts_hold(map, player, *m.target, fp.forward_len);
  if (moved || broken) {
    FollowScoring scoring = s.tuning.follow_scoring;
    scoring.buddy = a.pose.position;
    m.candidates = generate_follow_positions(map, player, fp.region, fp.n_rays, fp.forward_len, scoring,
                                             fp.pullback);
    m.anchor = player.position;
    m.replanned = true;
    m.target.reset();
    m.usable = 0;
    const DistanceField walk(map, cell_of(a.pose.position));
    for (const auto& c : m.candidates) {
      if (c.stage_reached != FollowStage::Accepted) continue;
      if (!walk.reachable(cell_of(c.position))) continue;
      if (!m.target) m.target = c.position;
      ++m.usable;
    }
  }
  m.ticks_without = m.usable == 0 ? m.ticks_without + 1 : 0;

  if (m.usable == 0) {
    const auto observers = observers_of_buddy(s.world);
    m.pending_teleport = teleport_check(map, a.pose.position, player, m.usable, m.ticks_without, observers,
                                        s.tuning.teleport);
  } else {
    m.pending_teleport.reset();
  }
}

// --------------------------------------------------------------- canvass

void canvass_upkeep(TickScratch& s) {
  AgentState& a = s.agent;
  const Point focus = a.awareness.focus.value_or(a.pose.position);
  if (a.canvass && distance(focus, a.canvass->focus) > kCanvassRestart) {
    a.canvass.reset();
    a.stack.truncate(2);
  }
}

void start_canvass(TickScratch& s) {
  AgentState& a = s.agent;
  CanvassMemory m{init_canvass(*s.world.map, a.pose, s.tuning.canvass_radius),
                  RecencyBuffer(s.tuning.canvass_recency),
                  a.awareness.focus.value_or(a.pose.position),
                  std::nullopt,
                  a.pose,
                  0,
                  0,
                  false,
                  {}};
  a.canvass = std::move(m);
  ++a.canvass_epoch;
}

// ------------------------------------------------------------- behaviours

Step run_move(TickScratch& s, std::size_t depth) {
  AgentState& a = s.agent;
  BehaviourFrame& f = a.stack.at(depth);
  const bool root = depth == 1;
  const Point goal = goal_point(s, f);
  if (f.melee) try_melee(s);

  if (distance(a.pose.position, goal) <= kArrive) {
    if (!root) {
      a.stack.pop();
      return Step::Changed;
    }
    switch (a.skill.value_or(SkillId::Sleep)) {
      case SkillId::Scripted:
        if (!a.patrol.empty()) {
          a.patrol_index = (a.patrol_index + 1) % a.patrol.size();
          return Step::Changed;
        }
        break;
      case SkillId::Investigate:
        s.action.face = a.pose.heading + kScanTurn;
        return Step::Acted;
      default: break;
    }
    if (f.goal != MoveGoal::Player) face_point(s, s.threat);
    return Step::Acted;
  }

  if (!steer_to(s, goal, f.avoid_player)) {
    if (!root) {
      a.stack.pop();
      return Step::Changed;
    }
    face_point(s, goal);
    return Step::Acted;
  }
  if (f.goal == MoveGoal::Player || f.melee) {
    // Keep eyes on the quarry while closing in.
    if (s.ctx.player_visible) s.action.face = bearing_to(a.pose.position, s.world.player.position);
  }
  return Step::Acted;
}

Step run_stand_and_shoot(TickScratch& s) {
  AgentState& a = s.agent;
  const CombatParams& c = a.archetype.combat;
  face_point(s, s.ctx.player_visible ? s.world.player.position : s.threat);
  if (s.ctx.player_visible && a.fire_cooldown == 0 && a.reload_left == 0 && a.clip > 0) {
    s.action.attack = AttackKind::Ranged;
    s.action.attack_target = s.world.player.position;
    s.action.emit_sound = s.tuning.gunshot_loudness;
    --a.clip;
    ++a.shots_fired;
    a.fire_cooldown = c.fire_cooldown;
  }
  return Step::Acted;
}

Step run_take_cover(TickScratch& s) {
  AgentState& a = s.agent;
  BehaviourFrame& f = a.stack.at(1);
  if (f.mode == 1) {
    // Buddy hiding: crouch beside the nearest low cover.
    if (!f.flag) {
      const auto spot = nearest_cover_spot(*s.world.map, a.pose.position, 6.0);
      f.target = spot ? cell_center(*spot) : a.pose.position;
      f.flag = true;
    }
    if (distance(a.pose.position, f.target) > kArrive) {
      a.stack.push({BehaviourId::MoveToLocation, MoveGoal::Fixed, f.target});
      return Step::Changed;
    }
    face_point(s, s.threat);
    return Step::Acted;
  }
  if (a.posts.held && distance(a.pose.position, cell_center(*a.posts.held)) > kArrive) {
    BehaviourFrame move{BehaviourId::MoveToLocation, MoveGoal::HeldPost, cell_center(*a.posts.held)};
    move.avoid_player = true;
    a.stack.push(move);
    return Step::Changed;
  }
  a.stack.push({BehaviourId::StandAndShoot, MoveGoal::Fixed, a.pose.position});
  return Step::Changed;
}

Step run_canvass(TickScratch& s) {
  AgentState& a = s.agent;
  const GridMap& map = *s.world.map;
  const auto& prims = a.archetype.primitives;
  const Point focus = a.awareness.focus.value_or(a.pose.position);

  if (!a.canvass) {
    if (distance(a.pose.position, focus) > 1.0) {
      BehaviourFrame move{BehaviourId::MoveToLocation, MoveGoal::Fixed, focus};
      a.stack.push(move);
      return Step::Changed;
    }
    start_canvass(s);
    a.canvass->focus = focus;
  }
  CanvassMemory& m = *a.canvass;

  if (m.pending) {
    const Point end = m.pending->pose.position;
    if (distance(a.pose.position, end) <= kArrive) {
      commit_choice(m.grid, map, m.pending_from, prims, *m.pending, m.recency);
      m.last_wedge = swept_cells(map, m.pending_from, prims[m.pending->index]);
      m.pending.reset();
      ++m.steps;
    } else {
      const Point d = end - a.pose.position;
      const double len = length(d);
      const double step = std::min(len, a.archetype.move_speed);
      s.action.move_intent = d * (step / len);
      s.action.face = m.pending->pose.heading;
      s.action.emit_sound = a.archetype.footstep_loudness;
      ++m.pending_ticks;
      return Step::Acted;
    }
  }

  if (m.stalled || canvass_done(m.grid, map, a.pose, prims)) {
    s.action.face = a.pose.heading + kScanTurn;
    return Step::Acted;
  }
  const std::vector<int> scores = kernels::score_primitives(m.grid, map, a.pose, prims);
  CanvassChoice choice = choose_canvass_step(m.grid, map, a.pose, prims, scores, m.recency);
  if (choice.stalled) {
    m.stalled = true;
    return Step::Acted;
  }
  m.pending = choice;
  m.pending_from = a.pose;
  m.pending_ticks = 0;
  s.action.face = choice.pose.heading;
  const Point d = choice.pose.position - a.pose.position;
  const double len = length(d);
  if (len > 0.0) {
    const double step = std::min(len, a.archetype.move_speed);
    s.action.move_intent = d * (step / len);
    s.action.emit_sound = a.archetype.footstep_loudness;
  }
  return Step::Acted;
}

Step run_follow(TickScratch& s) {
  AgentState& a = s.agent;
  if (a.follow.pending_teleport) {
    s.action.teleport_to = a.follow.pending_teleport;
    return Step::Acted;
  }
  if (a.follow.target && distance(a.pose.position, *a.follow.target) > kArrive) {
    a.stack.push({BehaviourId::MoveToLocation, MoveGoal::FollowTarget, *a.follow.target});
    return Step::Changed;
  }
  s.action.face = s.world.player.heading;
  return Step::Acted;
}

Step run_wander(TickScratch& s) {
  AgentState& a = s.agent;
  BehaviourFrame& f = a.stack.at(1);
  if (f.mode == 0) f.mode = a.rng.uniform_int(2, 4);  // legs before resting
  if (f.flag) {
    // The move child popped: one leg finished.
    f.flag = false;
    if (++a.wander_legs >= f.mode) {
      a.wander_legs = 0;
      f.mode = 0;
      a.rest_ticks = a.rng.uniform_int(30, 80);
      return Step::Acted;
    }
  }
  const GridMap& map = *s.world.map;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double bearing = a.rng.uniform() * kTwoPi;
    const double dist = 1.0 + a.rng.uniform() * s.tuning.wander_radius;
    const Point target = a.pose.position + unit_from_angle(bearing) * dist;
    if (!map.contains(target) || map.at(cell_of(target)) != CellKind::Free) continue;
    if (!find_path(map, a.pose.position, target).found()) continue;
    f.flag = true;
    f.target = target;
    a.stack.push({BehaviourId::MoveToLocation, MoveGoal::Fixed, target});
    return Step::Changed;
  }
  // Nowhere to go this tick: count it as a leg so the agent eventually rests.
  f.flag = true;
  return Step::Acted;
}

Step run_ambush(TickScratch& s) {
  AgentState& a = s.agent;
  BehaviourFrame& f = a.stack.at(1);
  if (!f.flag) {
    const auto spot = nearest_cover_spot(*s.world.map, a.pose.position, s.tuning.ambush_radius);
    f.target = spot ? cell_center(*spot) : a.pose.position;
    f.flag = true;
  }
  if (distance(a.pose.position, f.target) > kArrive) {
    a.stack.push({BehaviourId::MoveToLocation, MoveGoal::Fixed, f.target});
    return Step::Changed;
  }
  face_point(s, s.threat);
  return Step::Acted;
}

Step run_throw(TickScratch& s) {
  AgentState& a = s.agent;
  face_point(s, s.world.player.position);
  if (a.throw_cooldown == 0) {
    s.action.attack = AttackKind::Throw;
    s.action.attack_target = s.world.player.position;
    a.throw_cooldown = a.archetype.combat.throw_cooldown;
  }
  return Step::Acted;
}

Step run_frame(TickScratch& s) {
  AgentState& a = s.agent;
  const std::size_t depth = a.stack.depth() - 1;
  switch (a.stack.top().id) {
    case BehaviourId::MoveToLocation: return run_move(s, depth);
    case BehaviourId::StandAndShoot: return run_stand_and_shoot(s);
    case BehaviourId::TakeCover: return run_take_cover(s);
    case BehaviourId::Canvass: return run_canvass(s);
    case BehaviourId::FollowPlayer: return run_follow(s);
    case BehaviourId::WanderStep: return run_wander(s);
    case BehaviourId::AmbushWait: return run_ambush(s);
    case BehaviourId::ThrowProjectile: return run_throw(s);
    case BehaviourId::Idle: return Step::Acted;
  }
  return Step::Acted;
}

// ------------------------------------------------------------ skill setup

Point flee_point(const TickScratch& s) {
  const AgentState& a = s.agent;
  const GridMap& map = *s.world.map;
  std::optional<Point> best;
  double best_d = -1.0;
  for (int i = 0; i < 16; ++i) {
    const Point p = a.pose.position + unit_from_angle(i * kTwoPi / 16.0) * 5.0;
    if (!map.contains(p) || map.at(cell_of(p)) != CellKind::Free) continue;
    if (!find_path(map, a.pose.position, p).found()) continue;
    const double d = distance(p, s.threat);
    if (d > best_d) {
      best_d = d;
      best = p;
    }
  }
  return best.value_or(a.pose.position);
}

std::optional<Point> chasing_ally(const TickScratch& s) {
  const AgentState& a = s.agent;
  std::optional<Point> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const AgentState& o : s.world.agents) {
    if (o.id == a.id || !o.alive || o.is_player || !is_infected(o.archetype.kind)) continue;
    if (o.skill != SkillId::Chase) continue;
    const double d = distance(o.pose.position, a.pose.position);
    if (d <= s.tuning.herd_radius && d < best_d) {
      best_d = d;
      best = o.pose.position;
    }
  }
  return best;
}

BehaviourFrame root_frame(const TickScratch& s, SkillId skill) {
  const AgentState& a = s.agent;
  BehaviourFrame f;
  f.id = root_behaviour(skill, a.archetype.kind);
  f.target = a.pose.position;
  switch (skill) {
    case SkillId::Chase:
      f.goal = MoveGoal::Focus;
      f.melee = true;
      break;
    case SkillId::Melee:
      f.goal = MoveGoal::Player;
      f.melee = true;
      break;
    case SkillId::Investigate: f.goal = MoveGoal::Focus; break;
    case SkillId::Scripted: f.goal = MoveGoal::Patrol; break;
    case SkillId::Panic: f.target = flee_point(s); break;
    case SkillId::Follow:
      if (f.id == BehaviourId::MoveToLocation) f.target = chasing_ally(s).value_or(a.pose.position);
      break;
    case SkillId::Hide:
      if (a.archetype.kind == ArchetypeKind::Buddy) f.mode = 1;
      break;
    default: break;
  }
  return f;
}

void enter_skill(TickScratch& s, SkillId skill) {
  AgentState& a = s.agent;
  a.skill = skill;
  a.stack.clear_to_idle();
  a.path.clear();
  a.path_index = 0;
  a.canvass.reset();
  a.posts.held.reset();
  a.posts.chosen_id = -1;
  const BehaviourFrame f = root_frame(s, skill);
  if (f.id != BehaviourId::Idle) a.stack.push(f);
}

void combat_bookkeeping(AgentState& a) {
  const CombatParams& c = a.archetype.combat;
  if (a.fire_cooldown > 0) --a.fire_cooldown;
  if (a.throw_cooldown > 0) --a.throw_cooldown;
  if (a.rest_ticks > 0) --a.rest_ticks;
  if (a.reload_left > 0 && --a.reload_left == 0) {
    const int n = std::min(c.clip, a.reserve);
    a.clip += n;
    a.reserve -= n;
  }
  if (a.archetype.kind == ArchetypeKind::Hunter && a.clip == 0 && a.reserve > 0 && a.reload_left == 0)
    a.reload_left = c.reload_ticks;
}

SkillContext build_context(const TickScratch& s, std::span<const Percept> percepts) {
  const AgentState& a = s.agent;
  const CombatParams& c = a.archetype.combat;
  SkillContext x;
  x.phase = a.awareness.phase;
  x.player_visible = std::any_of(percepts.begin(), percepts.end(),
                                 [](const Percept& p) { return p.kind == PerceptKind::Sight; });
  const double d = distance(a.pose.position, s.world.player.position);
  x.in_melee_range = d <= c.melee_range;
  x.throw_in_band = d >= c.throw_min && d <= c.throw_max;
  x.throw_ready = a.throw_cooldown == 0;
  x.armed = a.clip + a.reserve > 0;
  x.reloading = a.reload_left > 0;
  x.has_script = !a.patrol.empty();
  x.resting = a.rest_ticks > 0;
  x.cover_nearby = nearest_cover_spot(*s.world.map, a.pose.position, s.tuning.ambush_radius).has_value();
  x.ally_chasing = is_infected(a.archetype.kind) && chasing_ally(s).has_value();
  for (const AgentState& o : s.world.agents)
    if (o.id != a.id && o.alive && !o.is_player && o.archetype.kind != ArchetypeKind::Buddy &&
        o.awareness.phase == AwarenessPhase::Alert)
      x.enemy_alert = true;
  return x;
}

}  // namespace

void BehaviourStack::push(const BehaviourFrame& f) {
  if (frames_.size() >= kMaxDepth) throw std::logic_error("behaviour stack overflow");
  frames_.push_back(f);
}

void BehaviourStack::pop() {
  if (frames_.size() > 1) frames_.pop_back();
}

void BehaviourStack::truncate(std::size_t depth) {
  depth = std::max<std::size_t>(depth, 1);
  if (frames_.size() > depth) frames_.resize(depth);
}

std::vector<BehaviourId> BehaviourStack::ids() const {
  std::vector<BehaviourId> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(f.id);
  return out;
}

AgentState make_agent(int id, const Archetype& archetype, const Pose& spawn, std::uint64_t seed) {
  AgentState a;
  a.id = id;
  a.archetype = archetype;
  a.pose = spawn;
  a.clip = archetype.kind == ArchetypeKind::Hunter ? archetype.combat.clip : 0;
  a.reserve = archetype.kind == ArchetypeKind::Hunter ? archetype.combat.reserve : 0;
  a.rng = SplitMix64(stream_seed(seed, static_cast<std::uint64_t>(id)));
  return a;
}

AgentState make_player(const Pose& spawn) {
  AgentState a;
  a.id = 0;
  a.is_player = true;
  a.pose = spawn;
  a.archetype.skills.clear();
  a.archetype.vision = InverseDistanceCone{};
  a.archetype.move_speed = 0.3;
  return a;
}

std::optional<Cell> nearest_cover_spot(const GridMap& map, Point p, double radius) {
  constexpr Cell kOrthogonal[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  const Cell c0 = cell_of(p);
  for (int y = c0.y - r; y <= c0.y + r; ++y) {
    for (int x = c0.x - r; x <= c0.x + r; ++x) {
      const Cell c{x, y};
      if (!map.in_bounds(c) || map.at(c) != CellKind::Free) continue;
      const double d = distance(cell_center(c), p);
      if (d > radius) continue;
      bool beside_cover = false;
      for (const Cell o : kOrthogonal)
        if (map.in_bounds({x + o.x, y + o.y}) && map.at({x + o.x, y + o.y}) == CellKind::LowCover)
          beside_cover = true;
      if (!beside_cover) continue;
      if (d < best_d || (d == best_d && map.index(c) < map.index(*best))) {
        best_d = d;
        best = c;
      }
    }
  }
  return best;
}

std::vector<Observer> observers_of_buddy(const AgentWorld& world) {
  std::vector<Observer> out;
  for (const AgentState& o : world.agents) {
    if (!o.alive || o.is_player || o.archetype.kind == ArchetypeKind::Buddy) continue;
    out.push_back({o.pose, o.archetype.vision});
  }
  out.push_back({world.player, world.tuning->player_vision});
  return out;
}

AgentAction tick_agent(AgentState& agent, const AgentWorld& world, std::span<const Percept> percepts) {
  if (!agent.alive || agent.is_player) return {};
  const AgentTuning& tuning = *world.tuning;
  TickScratch s{agent, world, tuning, {}, {}, {}, {}};

  agent.awareness = update_awareness(agent.awareness, percepts, tuning.awareness);
  combat_bookkeeping(agent);
  s.threat = agent.awareness.focus.value_or(world.player.position);
  if (agent.archetype.kind == ArchetypeKind::Buddy) {
    // The buddy hides from whichever enemy is hunting hardest: the nearest Alert one.
    double best = std::numeric_limits<double>::infinity();
    for (const AgentState& o : world.agents)
      if (o.alive && !o.is_player && o.archetype.kind != ArchetypeKind::Buddy &&
          o.awareness.phase == AwarenessPhase::Alert && distance(o.pose.position, agent.pose.position) < best) {
        best = distance(o.pose.position, agent.pose.position);
        s.threat = o.pose.position;
      }
  }

  s.ctx = build_context(s, percepts);
  agent.posts.rays_this_tick = 0;
  if (uses_posts(agent)) evaluate_posts(s);
  agent.last_context = s.ctx;

  const SkillId skill = select_skill(agent.archetype, s.ctx);
  if (agent.skill != skill) enter_skill(s, skill);

  // Upkeep of the root frame may invalidate what sits above it.
  if (agent.stack.depth() >= 2) {
    BehaviourFrame& root = agent.stack.at(1);
    switch (root.id) {
      case BehaviourId::FollowPlayer: follow_upkeep(s); break;
      case BehaviourId::Canvass: canvass_upkeep(s); break;
      case BehaviourId::TakeCover:
        if (root.mode == 0 && refresh_held_post(s, skill)) agent.stack.truncate(2);
        break;
      case BehaviourId::MoveToLocation:
        if (skill == SkillId::Follow) root.target = chasing_ally(s).value_or(root.target);
        break;
      default: break;
    }
  }

  for (int i = 0; i < kMaxTransitions; ++i)
    if (run_frame(s) == Step::Acted) break;

  // Hard bound on speed, whatever the behaviour asked for.
  const double speed = length(s.action.move_intent);
  if (speed > agent.archetype.move_speed)
    s.action.move_intent = s.action.move_intent * (agent.archetype.move_speed / speed);
  return s.action;
}

}  // namespace stealth
