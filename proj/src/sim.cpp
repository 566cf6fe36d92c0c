#include "stealth/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stealth {

std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::Walk: return "walk";
    case Stance::Sneak: return "sneak";
    case Stance::Sprint: return "sprint";
  }
  return "walk";
}

std::optional<Stance> stance_from_string(std::string_view s) {
  if (s == "walk") return Stance::Walk;
  if (s == "sneak") return Stance::Sneak;
  if (s == "sprint") return Stance::Sprint;
  return std::nullopt;
}

Point resolve_move(const GridMap& map, Point from, Point delta) {
  const auto ok = [&](Point to) {
    return map.contains(to) && map.passable(cell_of(to)) && line_clear(map, from, to, RayHeight::Stand);
  };
  if (delta.x == 0.0 && delta.y == 0.0) return from;
  if (ok(from + delta)) return from + delta;
  if (delta.x != 0.0 && ok(from + Point{delta.x, 0.0})) return from + Point{delta.x, 0.0};
  if (delta.y != 0.0 && ok(from + Point{0.0, delta.y})) return from + Point{0.0, delta.y};
  return from;
}

AgentRecord record_agent(const AgentState& a) {
  AgentRecord r;
  r.id = a.id;
  r.kind = a.is_player ? "player" : std::string(to_string(a.archetype.kind));
  r.pose = a.pose;
  r.alive = a.alive;
  r.phase = a.awareness.phase;
  r.focus = a.awareness.focus;
  r.skill = a.skill;
  r.stack = a.stack.ids();
  r.context = a.last_context;
  r.post_id = a.posts.chosen_id;
  r.post_rays = a.posts.rays_this_tick;
  r.post_count = static_cast<int>(a.posts.posts.size());
  r.follow_candidates = static_cast<int>(std::count_if(a.follow.candidates.begin(), a.follow.candidates.end(),
                                                       [](const FollowCandidate& c) {
                                                         return c.stage_reached == FollowStage::Accepted;
                                                       }));
  r.follow_usable = a.follow.usable;
  r.follow_replanned = a.follow.replanned;
  if (a.canvass) {
    r.canvass_unseen = static_cast<int>(a.canvass->grid.unseen());
    r.canvass_initial = static_cast<int>(a.canvass->grid.initial_unseen());
  }
  r.canvass_epoch = a.canvass_epoch;
  r.teleported = a.teleported;
  r.rng_draws = a.rng.draws();
  return r;
}

Simulation::Simulation(const Scenario& scenario, const std::map<std::string, double>& overrides)
    : Simulation(scenario, scenario.seed, overrides) {}

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed, const std::map<std::string, double>& overrides)
    : scenario_(scenario), map_(scenario.map), config_(resolve_config(scenario, overrides)), seed_(seed) {
  init();
}

void Simulation::reset(std::uint64_t seed) {
  seed_ = seed;
  init();
}

void Simulation::init() {
  state_ = {};
  state_.agents.push_back(make_player(scenario_.player_spawn));
  int id = 1;
  for (const AgentSpawn& spawn : scenario_.agents) {
    AgentState a = make_agent(id++, config_.archetype(spawn.kind), spawn.pose, seed_);
    a.patrol = spawn.patrol;
    state_.agents.push_back(std::move(a));
  }
}

double Simulation::player_speed(Stance s) const {
  switch (s) {
    case Stance::Walk: return config_.player.walk_speed;
    case Stance::Sneak: return config_.player.sneak_speed;
    case Stance::Sprint: return config_.player.sprint_speed;
  }
  return config_.player.walk_speed;
}

double Simulation::player_loudness(Stance s) const {
  switch (s) {
    case Stance::Walk: return config_.player.walk_loudness;
    case Stance::Sneak: return config_.player.sneak_loudness;
    case Stance::Sprint: return config_.player.sprint_loudness;
  }
  return config_.player.walk_loudness;
}

Point Simulation::resolve_move(Point from, Point delta) const { return stealth::resolve_move(map_, from, delta); }

namespace {

/// Enemies notice the player and the buddy by ear; they ignore each other's noise.
bool enemy_listens_to(const std::vector<AgentState>& agents, int source) {
  if (source < 0 || source >= static_cast<int>(agents.size())) return false;
  const AgentState& s = agents[static_cast<std::size_t>(source)];
  return s.is_player || s.archetype.kind == ArchetypeKind::Buddy;
}

std::vector<Percept> perceive(const AgentState& a, const std::vector<AgentState>& agents, const GridMap& map,
                              std::span<const SoundEvent> heard_sounds, std::int64_t tick) {
  std::vector<Percept> out;
  // The buddy takes its cues from the enemies' state rather than its own senses.
  if (a.archetype.kind == ArchetypeKind::Buddy) return out;
  const AgentState& player = agents.front();
  if (can_see(a.archetype.vision, map, a.pose, player.pose.position))
    out.push_back({PerceptKind::Sight, player.pose.position, tick});
  std::vector<SoundEvent> audible;
  for (const SoundEvent& e : heard_sounds)
    if (e.source_agent != a.id && enemy_listens_to(agents, e.source_agent)) audible.push_back(e);
  for (Percept p : hear(a.archetype.hearing, map, a.pose.position, audible)) {
    p.tick = tick;
    out.push_back(p);
  }
  return out;
}

/// Where a thrown brick lands: the target, pulled in to the throw range and
/// stopped just short of the first wall on the way.
Point brick_landing(const GridMap& map, Point from, Point target, double range) {
  Point to = target;
  const double d = distance(from, target);
  if (d > range) to = from + (target - from) * (range / d);
  const RayHit hit = raycast(map, from, to, RayHeight::Stand);
  if (hit.blocked() && hit.hit_point) {
    const Point dir = to - from;
    const double len = length(dir);
    Point p = *hit.hit_point;
    if (len > 0.0) p = p - dir * (1e-6 / len);
    return p;
  }
  return to;
}

}  // namespace

TickRecord Simulation::step(const PlayerInput& in) {
  const std::int64_t tick = state_.tick;
  auto& agents = state_.agents;
  TickRecord rec;
  rec.tick = tick;
  rec.input = in;
  std::vector<SoundEvent> emitted;
  std::uint64_t draws_before = 0;
  for (const AgentState& a : agents) draws_before += a.rng.draws();
  for (AgentState& a : agents) a.teleported = false;

  // 1. Player input.
  AgentState& player = agents.front();
  {
    Point move = in.move;
    const double len = length(move);
    if (len > 1.0) move = move * (1.0 / len);
    const Point delta = move * player_speed(in.stance);
    const Point next = resolve_move(player.pose.position, delta);
    if (distance(next, player.pose.position) > 0.0) {
      player.pose = Pose(next, bearing_to(player.pose.position, next));
      emitted.push_back({next, player_loudness(in.stance), tick, 0});
    }
    if (in.action == PlayerActionKind::ThrowBrick) {
      const Point land = brick_landing(map_, player.pose.position, in.throw_target, config_.player.brick_range);
      emitted.push_back({land, config_.player.brick_loudness, tick, 0});
    } else if (in.action == PlayerActionKind::Attack && in.attack_target > 0 &&
               in.attack_target < static_cast<int>(agents.size())) {
      AgentState& t = agents[static_cast<std::size_t>(in.attack_target)];
      if (t.alive && distance(t.pose.position, player.pose.position) <= config_.player.attack_range &&
          line_clear(map_, player.pose.position, t.pose.position, RayHeight::Stand))
        t.alive = false;
    }
  }

  // 2-4. Perception, awareness, skills and behaviours, in id order.
  std::vector<Cell> claimed;
  AgentWorld world{&map_, tick, &config_.agent, player.pose, agents, &claimed};
  std::vector<AgentAction> actions(agents.size());
  for (std::size_t i = 1; i < agents.size(); ++i) {
    AgentState& a = agents[i];
    if (!a.alive) continue;
    const auto percepts = perceive(a, agents, map_, state_.pending_sounds, tick);
    actions[i] = tick_agent(a, world, percepts);
  }

  // 5. Action resolution: movement, attacks, sounds; teleports last.
  for (std::size_t i = 1; i < agents.size(); ++i) {
    AgentState& a = agents[i];
    const AgentAction& act = actions[i];
    if (!a.alive) continue;
    const Point next = resolve_move(a.pose.position, act.move_intent);
    a.pose = Pose(next, act.face.value_or(a.pose.heading));
    if (act.emit_sound) emitted.push_back({a.pose.position, *act.emit_sound, tick, a.id});
    const Point pp = player.pose.position;
    const double d = distance(a.pose.position, pp);
    switch (act.attack) {
      case AttackKind::Melee:
        if (d <= a.archetype.combat.melee_range) ++state_.player_hits;
        break;
      case AttackKind::Ranged:
        if (d <= config_.ranged_hit_range && line_clear(map_, a.pose.position, pp, RayHeight::Stand))
          ++state_.player_hits;
        break;
      case AttackKind::Throw:
        if (d <= a.archetype.combat.throw_max) ++state_.player_hits;
        emitted.push_back({pp, config_.agent.throw_loudness, tick, a.id});
        break;
      case AttackKind::None: break;
    }
  }
  for (std::size_t i = 1; i < agents.size(); ++i) {
    AgentState& a = agents[i];
    if (!a.alive || !actions[i].teleport_to) continue;
    // Re-validate against where everyone ended up this tick.
    const Point to = *actions[i].teleport_to;
    const AgentWorld after{&map_, tick, &config_.agent, player.pose, agents, nullptr};
    bool seen = false;
    for (const Observer& o : observers_of_buddy(after))
      if (can_see(o.vision, map_, o.pose, to)) seen = true;
    if (seen || !map_.passable(cell_of(to))) continue;
    a.pose = Pose(to, a.pose.heading);
    a.teleported = true;
    a.follow = {};
    a.path.clear();
    a.path_index = 0;
    a.stack.truncate(std::min<std::size_t>(a.stack.depth(), 2));
    ++state_.teleports;
  }

  // 6. Record.
  state_.pending_sounds = emitted;
  rec.sounds = std::move(emitted);
  std::uint64_t draws_after = 0;
  for (const AgentState& a : agents) {
    draws_after += a.rng.draws();
    rec.agents.push_back(record_agent(a));
  }
  rec.rng_draws = draws_after - draws_before;
  rec.player_hits = state_.player_hits;
  rec.teleports = state_.teleports;
  ++state_.tick;
  return rec;
}

// ------------------------------------------------------------------ scripts

namespace {

double parse_number(std::string_view tok, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
    throw ScenarioError("parse", line, "bad number '" + std::string(tok) + "' in input script");
  return v;
}

}  // namespace

std::vector<PlayerInput> parse_script(std::string_view text) {
  std::vector<PlayerInput> out;
  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    long repeat = 1;
    std::size_t k = 0;
    if (tok[0].back() == '*') {
      repeat = static_cast<long>(parse_number(std::string_view(tok[0]).substr(0, tok[0].size() - 1), line_no));
      if (repeat < 1) throw ScenarioError("parse", line_no, "repeat count must be positive");
      k = 1;
    }
    if (tok.size() < k + 3) throw ScenarioError("parse", line_no, "expected: [N*] dx dy stance [action]");
    PlayerInput in;
    in.move = {parse_number(tok[k], line_no), parse_number(tok[k + 1], line_no)};
    const auto stance = stance_from_string(tok[k + 2]);
    if (!stance) throw ScenarioError("parse", line_no, "unknown stance '" + tok[k + 2] + "'");
    in.stance = *stance;
    const std::size_t rest = tok.size() - (k + 3);
    if (rest > 0) {
      const std::string& verb = tok[k + 3];
      if (verb == "throw" && rest == 3) {
        in.action = PlayerActionKind::ThrowBrick;
        in.throw_target = {parse_number(tok[k + 4], line_no), parse_number(tok[k + 5], line_no)};
      } else if (verb == "attack" && rest == 2) {
        in.action = PlayerActionKind::Attack;
        in.attack_target = static_cast<int>(parse_number(tok[k + 4], line_no));
      } else {
        throw ScenarioError("parse", line_no, "unknown action '" + verb + "'");
      }
    }
    out.insert(out.end(), static_cast<std::size_t>(repeat), in);
  }
  return out;
}

std::vector<PlayerInput> load_script_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("io", 0, "cannot open input script " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_script(ss.str());
}

HeadlessRun run_headless(const Scenario& scenario, const std::vector<PlayerInput>& script, std::int64_t max_ticks,
                         std::optional<std::uint64_t> seed, const std::map<std::string, double>& overrides) {
  Simulation sim(scenario, seed.value_or(scenario.seed), overrides);
  const std::int64_t n = max_ticks > 0 ? max_ticks : static_cast<std::int64_t>(script.size());
  HeadlessRun run;
  run.records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    run.records.push_back(sim.step(i < script.size() ? script[i] : PlayerInput{}));
  }
  return run;
}

}  // namespace stealth
