#include "stealth/posts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stealth/kernels.hpp"

namespace stealth {

namespace {

constexpr Cell kOrthogonal[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double distance_band(const EvaluatedPost& p, const SelectionContext& ctx) {
  const auto& cfg = ctx.config;
  const double d = distance(p.post.position, ctx.threat);
  if (d < cfg.band_min) return clamp01(d / cfg.band_min);
  if (d <= cfg.band_max) return 1.0;
  return clamp01(1.0 - (d - cfg.band_max) / cfg.band_falloff);
}

double cover_from_threat(const EvaluatedPost& p, const SelectionContext&) {
  const bool crouch_blocked = p.validation.ray(RayPurpose::ThreatCrouch).outcome == RayOutcome::Blocked;
  const bool stand_blocked = p.validation.ray(RayPurpose::ThreatStand).outcome == RayOutcome::Blocked;
  if (crouch_blocked && !stand_blocked) return 1.0;
  if (crouch_blocked) return 0.6;
  return 0.2;
}

double not_recently_used(const EvaluatedPost& p, const SelectionContext& ctx) {
  const bool recent = std::find(ctx.recent_posts.begin(), ctx.recent_posts.end(), p.post.cell) !=
                      ctx.recent_posts.end();
  return recent ? 0.25 : 1.0;
}

double line_of_fire(const EvaluatedPost& p, const SelectionContext&) {
  return p.validation.ray(RayPurpose::ThreatStand).outcome == RayOutcome::Clear ? 1.0 : 0.1;
}

double flank_angle(const EvaluatedPost& p, const SelectionContext& ctx) {
  const Point rel = p.post.position - ctx.player.position;
  const double len = length(rel);
  if (len == 0.0) return 0.0;
  const double c = dot(rel * (1.0 / len), unit_from_angle(ctx.player.heading));
  return clamp01((1.0 - c) / 2.0);
}

double ally_separation(const EvaluatedPost& p, const SelectionContext& ctx) {
  if (ctx.allies.empty()) return 1.0;
  double nearest = std::numeric_limits<double>::infinity();
  for (const Point a : ctx.allies) nearest = std::min(nearest, distance(a, p.post.position));
  return clamp01(nearest / ctx.config.ally_separation);
}

double approach_short(const EvaluatedPost& p, const SelectionContext& ctx) {
  const double len = npc_path_length(ctx, p.post.cell);
  if (!std::isfinite(len)) return 0.0;
  return 1.0 / (1.0 + len / ctx.config.approach_scale);
}

}  // namespace

std::string_view to_string(RayPurpose purpose) {
  switch (purpose) {
    case RayPurpose::ThreatStand: return "threat_stand";
    case RayPurpose::ThreatCrouch: return "threat_crouch";
    case RayPurpose::Approach: return "approach";
    case RayPurpose::Exposure: return "exposure";
  }
  return "threat_stand";
}

SelectionContext make_context(const GridMap& map, const Pose& npc, const Pose& player,
                              const PostsConfig& config) {
  SelectionContext ctx;
  ctx.npc = npc;
  ctx.player = player;
  ctx.map = &map;
  ctx.threat = player.position;
  ctx.config = config;
  return ctx;
}

CellMask near_player_mask(const GridMap& map, Point player, double radius) {
  CellMask mask(map.cell_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (distance(cell_center(map.cell_at_index(i)), player) <= radius) mask[i] = 1;
  return mask;
}

void prepare_paths(SelectionContext& ctx) {
  const Cell source = cell_of(ctx.npc.position);
  ctx.npc_field = std::make_shared<DistanceField>(*ctx.map, source);
  ctx.safe_field = std::make_shared<DistanceField>(
      *ctx.map, source, near_player_mask(*ctx.map, ctx.player.position, ctx.config.exclusion_radius));
}

double npc_path_length(const SelectionContext& ctx, Cell target) {
  if (ctx.npc_field) return ctx.npc_field->at(target);
  const PathResult p = find_path(*ctx.map, ctx.npc.position, cell_center(target));
  return p.found() ? p.length : std::numeric_limits<double>::infinity();
}

std::vector<Post> generate_posts(const GridMap& map, const SelectionContext& ctx) {
  struct Ranked {
    double dist;
    std::size_t index;
    Post post;
  };
  std::vector<Ranked> cover, open;
  const auto& cfg = ctx.config;

  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Cell c = map.cell_at_index(i);
    if (map.at(c) != CellKind::Free) continue;
    const Point center = cell_center(c);
    const double to_npc = distance(center, ctx.npc.position);

    if (to_npc <= cfg.cover_radius) {
      const Point toward_threat = ctx.threat - center;
      std::optional<double> best_dot;
      Post post;
      for (const Cell off : kOrthogonal) {
        const Cell nb{c.x + off.x, c.y + off.y};
        if (!map.in_bounds(nb)) continue;
        const CellKind k = map.at(nb);
        if (k != CellKind::LowCover && k != CellKind::Wall) continue;
        const Point normal{static_cast<double>(-off.x), static_cast<double>(-off.y)};
        const double d = dot(normal, toward_threat);
        if (!best_dot || d < *best_dot) {
          best_dot = d;
          post.cover_normal = normal;
          post.source_cover = k;
        }
      }
      if (best_dot && *best_dot < 0.0) {
        post.cell = c;
        post.position = center;
        post.kind = PostKind::Cover;
        cover.push_back({to_npc, i, post});
      }
    }

    const double to_player = distance(center, ctx.player.position);
    if (to_player >= cfg.open_r_min && to_player <= cfg.open_r_max) {
      Post post;
      post.cell = c;
      post.position = center;
      post.kind = PostKind::Open;
      open.push_back({to_npc, i, post});
    }
  }

  auto order = [](const Ranked& a, const Ranked& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.index < b.index;
  };
  std::sort(cover.begin(), cover.end(), order);
  std::sort(open.begin(), open.end(), order);

  std::vector<Post> out;
  int next_id = 0;
  for (std::size_t i = 0; i < cover.size() && static_cast<int>(i) < cfg.max_cover; ++i) {
    out.push_back(cover[i].post);
    out.back().id = next_id++;
  }
  for (std::size_t i = 0; i < open.size() && static_cast<int>(i) < cfg.max_open; ++i) {
    out.push_back(open[i].post);
    out.back().id = next_id++;
  }
  return out;
}

PostValidation validate_post(const GridMap& map, const Post& post, const SelectionContext& ctx) {
  PostValidation v;
  const Point threat = ctx.threat;
  const bool cover = post.kind == PostKind::Cover;
  const Point exposure_from =
      cover ? post.position + post.cover_normal * ctx.config.exposure_offset : post.position;

  auto cast = [&](RayPurpose purpose, RayHeight h, Point from, Point to) {
    return ValidationRay{purpose, h, raycast(map, from, to, h).outcome};
  };
  v.rays[0] = cast(RayPurpose::ThreatStand, RayHeight::Stand, post.position, threat);
  v.rays[1] = cast(RayPurpose::ThreatCrouch, RayHeight::Crouch, post.position, threat);
  v.rays[2] = cast(RayPurpose::Approach, RayHeight::Crouch, ctx.npc.position, post.position);
  v.rays[3] = cast(RayPurpose::Exposure, RayHeight::Crouch, exposure_from, threat);

  const bool stand_clear = v.rays[0].outcome == RayOutcome::Clear;
  const bool crouch_clear = v.rays[1].outcome == RayOutcome::Clear;
  const bool approach_clear = v.rays[2].outcome == RayOutcome::Clear;
  const bool exposure_clear = v.rays[3].outcome == RayOutcome::Clear;

  if (cover) {
    v.valid = approach_clear && !crouch_clear && stand_clear;
    const int accepted = int(stand_clear) + int(!crouch_clear) + int(approach_clear) + int(!exposure_clear);
    v.literal_valid = accepted > 0;
  } else {
    v.valid = approach_clear && crouch_clear;
    const int accepted = int(stand_clear) + int(crouch_clear) + int(approach_clear) + int(exposure_clear);
    v.literal_valid = accepted > 0;
  }
  return v;
}

double criterion_static_pathfind_not_near_player(const EvaluatedPost& p, const SelectionContext& ctx) {
  double full, safe;
  if (ctx.npc_field && ctx.safe_field) {
    full = ctx.npc_field->at(p.post.cell);
    safe = ctx.safe_field->at(p.post.cell);
  } else {
    const PathResult direct = find_path(*ctx.map, ctx.npc.position, p.post.position);
    if (!direct.found()) return 0.0;
    const PathResult detour =
        find_path(*ctx.map, ctx.npc.position, p.post.position,
                  near_player_mask(*ctx.map, ctx.player.position, ctx.config.exclusion_radius));
    if (!detour.found()) return 0.0;
    full = direct.length;
    safe = detour.length;
  }
  if (!std::isfinite(full) || !std::isfinite(safe)) return 0.0;
  return std::fabs(full - safe) <= 1e-9 * std::max(1.0, full) ? 1.0 : 0.0;
}

void CriterionRegistry::add(Criterion c) {
  std::string key = c.id;
  criteria_.insert_or_assign(std::move(key), std::move(c));
}

const Criterion* CriterionRegistry::find(std::string_view id) const {
  const auto it = criteria_.find(id);
  return it == criteria_.end() ? nullptr : &it->second;
}

std::vector<std::string> CriterionRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : criteria_) out.push_back(id);
  return out;
}

const CriterionRegistry& CriterionRegistry::defaults() {
  static const CriterionRegistry registry = [] {
    CriterionRegistry r;
    r.add({"distance-band-to-threat", distance_band});
    r.add({"cover-from-threat", cover_from_threat});
    r.add({"path-not-near-player", criterion_static_pathfind_not_near_player});
    r.add({"not-recently-used", not_recently_used});
    r.add({"line-of-fire-available", line_of_fire});
    r.add({"flank-angle", flank_angle});
    r.add({"ally-separation", ally_separation});
    r.add({"approach-short", approach_short});
    return r;
  }();
  return registry;
}

const std::vector<PostSelector>& default_selectors() {
  static const std::vector<PostSelector> selectors = {
      {"take-cover",
       {"cover-from-threat", "distance-band-to-threat", "path-not-near-player", "not-recently-used",
        "ally-separation", "approach-short"}},
      {"flank",
       {"flank-angle", "line-of-fire-available", "path-not-near-player", "distance-band-to-threat",
        "ally-separation"}},
      {"advance",
       {"distance-band-to-threat", "cover-from-threat", "path-not-near-player", "approach-short"}},
      {"hide", {"cover-from-threat", "path-not-near-player", "approach-short", "not-recently-used"}},
      {"investigate", {"approach-short", "line-of-fire-available", "path-not-near-player", "ally-separation"}},
  };
  return selectors;
}

const PostSelector* find_selector(std::string_view name) {
  for (const auto& s : default_selectors())
    if (s.name == name) return &s;
  return nullptr;
}

bool selector_resolves(const PostSelector& selector, const CriterionRegistry& registry) {
  if (selector.criteria.empty()) return false;
  return std::all_of(selector.criteria.begin(), selector.criteria.end(),
                     [&](const std::string& id) { return registry.find(id) != nullptr; });
}

std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx, const CriterionRegistry& registry) {
  return kernels::rate_posts(selector, posts, ctx, registry);
}

std::optional<int> select_post(std::span<const PostRating> ratings, std::span<const int> excluded) {
  for (const auto& r : ratings) {
    if (!(r.rating > 0.0)) continue;
    if (std::find(excluded.begin(), excluded.end(), r.post_id) != excluded.end()) continue;
    return r.post_id;
  }
  return std::nullopt;
}

}  // namespace stealth
