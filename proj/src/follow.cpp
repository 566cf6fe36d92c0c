#include "stealth/follow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stealth/kernels.hpp"

namespace stealth {

std::string_view to_string(FollowStage stage) {
  switch (stage) {
    case FollowStage::A: return "A";
    case FollowStage::B: return "B";
    case FollowStage::C: return "C";
    case FollowStage::Accepted: return "accepted";
  }
  return "A";
}

double score_candidate(const FollowCandidate& candidate, const Pose& player, const FollowScoring& s) {
  const double rear = player.heading + kPi;
  const Point ideal = player.position + unit_from_angle(rear) * s.ideal_dist;
  const double closeness = 1.0 / (1.0 + distance(candidate.position, ideal));
  const double low_travel = 1.0 / (1.0 + distance(candidate.position, s.buddy));
  const Point rel = candidate.position - player.position;
  const double off = (rel.x == 0.0 && rel.y == 0.0) ? kPi : angular_offset(std::atan2(rel.y, rel.x), rear);
  const double behindness = 1.0 - off / kPi;
  return s.w_close * closeness + s.w_travel * low_travel + s.w_behind * behindness;
}

std::vector<FollowCandidate> generate_follow_positions(const GridMap& map, const Pose& player,
                                                       const FollowRegion& region, int n_rays,
                                                       double forward_len, const FollowScoring& scoring,
                                                       double pullback) {
  std::vector<FollowCandidate> all;
  all.reserve(static_cast<std::size_t>(std::max(n_rays, 0)));
  const Point origin = player.position;
  const Point forward_dir = unit_from_angle(player.heading);
  const double arc_start = player.heading + region.arc_center - region.arc_half_width;
  const double spacing = 2.0 * region.arc_half_width / n_rays;

  for (int i = 0; i < n_rays; ++i) {
    FollowCandidate c;
    c.bearing_index = i;
    c.bearing = normalize_angle(arc_start + (i + 0.5) * spacing);
    const Point dir = unit_from_angle(c.bearing);

    // (a) player -> follow region
    const RayHit reach = raycast(map, origin, origin + dir * region.r_max, RayHeight::Crouch);
    double r = region.r_max;
    if (reach.blocked()) r = std::max(0.0, distance(origin, *reach.hit_point) - pullback);
    c.position = origin + dir * r;
    c.forward_point = c.position + forward_dir * forward_len;
    if (reach.blocked() && r < region.r_min) {
      c.stage_reached = FollowStage::A;
      all.push_back(c);
      continue;
    }
    // (b) forward from the candidate
    if (!line_clear(map, c.position, c.forward_point, RayHeight::Crouch)) {
      c.stage_reached = FollowStage::B;
      all.push_back(c);
      continue;
    }
    // (c) player -> forward position
    if (!line_clear(map, origin, c.forward_point, RayHeight::Crouch)) {
      c.stage_reached = FollowStage::C;
      all.push_back(c);
      continue;
    }
    c.stage_reached = FollowStage::Accepted;
    c.score = score_candidate(c, player, scoring);
    all.push_back(c);
  }

  std::stable_sort(all.begin(), all.end(), [](const FollowCandidate& a, const FollowCandidate& b) {
    const bool aa = a.stage_reached == FollowStage::Accepted;
    const bool ba = b.stage_reached == FollowStage::Accepted;
    if (aa != ba) return aa;
    if (aa && a.score != b.score) return a.score > b.score;
    return a.bearing_index < b.bearing_index;
  });
  return all;
}

bool follow_contracts_hold(const GridMap& map, const Pose& player, Point position, double forward_len) {
  const Point forward = position + unit_from_angle(player.heading) * forward_len;
  return line_clear(map, player.position, position, RayHeight::Crouch) &&
         line_clear(map, position, forward, RayHeight::Crouch) &&
         line_clear(map, player.position, forward, RayHeight::Crouch);
}

std::optional<Point> teleport_check(const GridMap& map, Point buddy, const Pose& player,
                                    int accepted_count, int ticks_without_position,
                                    std::span<const Observer> observers, const TeleportParams& params) {
  if (accepted_count > 0 || ticks_without_position < params.min_ticks) return std::nullopt;
  const PathResult route = find_path(map, buddy, player.position);
  const double path_len = route.found() ? route.length : std::numeric_limits<double>::infinity();
  if (path_len <= params.min_path) return std::nullopt;

  const Cell player_cell = cell_of(player.position);
  const DistanceField walk(map, player_cell);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Cell c = map.cell_at_index(i);
    if (c == player_cell || map.at(c) != CellKind::Free || !walk.reachable(c)) continue;
    cells.push_back(c);
  }
  std::stable_sort(cells.begin(), cells.end(), [&](Cell a, Cell b) {
    return distance(cell_center(a), player.position) < distance(cell_center(b), player.position);
  });

  std::vector<Point> points;
  points.reserve(cells.size());
  for (const Cell c : cells) points.push_back(cell_center(c));
  const std::vector<std::uint8_t> seen = kernels::observed_mask(map, observers, points);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!seen[i]) return points[i];
  return std::nullopt;
}

}  // namespace stealth
