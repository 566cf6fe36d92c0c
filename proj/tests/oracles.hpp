#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the plain data types, and they trade speed
// for obviousness: segment/grid-line intersection enumeration instead of a
// cell walk, O(V^2) uniform-cost search instead of a heap, full-map scans
// instead of bounding boxes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stealth/canvass.hpp"
#include "stealth/follow.hpp"
#include "stealth/perception.hpp"
#include "stealth/rng.hpp"
#include "stealth/world.hpp"

namespace oracle {

using namespace stealth;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool cell_blocks(const GridMap& map, Cell c, RayHeight h) {
  if (c.x < 0 || c.y < 0 || c.x >= map.width() || c.y >= map.height()) return true;
  const CellKind k = map.cells()[static_cast<std::size_t>(c.y) * map.width() + c.x];
  return k == CellKind::Wall || (h == RayHeight::Crouch && k == CellKind::LowCover);
}

/// Every parameter t in (0, 1) where the segment crosses a vertical or a
/// horizontal grid line, plus the endpoints. The segment is blocked if the
/// open piece between two consecutive events lies in a blocking cell, or if
/// it passes a grid corner where either of the two side cells blocks.
inline bool ray_blocked(const GridMap& map, Point a, Point b, RayHeight h) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  struct Event {
    double t;
    bool x, y;
  };
  std::vector<Event> ev;
  auto crossings = [&](double from, double d, bool is_x) {
    if (d == 0.0) return;
    const double lo = std::min(from, from + d), hi = std::max(from, from + d);
    for (double k = std::ceil(lo); k <= hi; k += 1.0) {
      const double t = (k - from) / d;
      if (t > 0.0 && t < 1.0) ev.push_back({t, is_x, !is_x});
    }
  };
  crossings(a.x, dx, true);
  crossings(a.y, dy, false);
  std::sort(ev.begin(), ev.end(), [](const Event& p, const Event& q) { return p.t < q.t; });
  // merge x and y crossings that coincide: those are corner passes
  std::vector<Event> merged;
  for (const Event& e : ev) {
    if (!merged.empty() && std::fabs(merged.back().t - e.t) <= 1e-9) {
      merged.back().x |= e.x;
      merged.back().y |= e.y;
    } else {
      merged.push_back(e);
    }
  }
  auto at = [&](double t) { return Point{a.x + t * dx, a.y + t * dy}; };
  auto cell_of_piece = [&](double t0, double t1) {
    const Point m = at(0.5 * (t0 + t1));
    return Cell{static_cast<int>(std::floor(m.x)), static_cast<int>(std::floor(m.y))};
  };
  if (dx == 0.0 && dy == 0.0) {
    return cell_blocks(map, {static_cast<int>(std::floor(a.x)), static_cast<int>(std::floor(a.y))}, h);
  }
  std::vector<double> ts{0.0};
  for (const Event& e : merged) ts.push_back(e.t);
  ts.push_back(1.0);
  Cell prev{};
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const Cell c = cell_of_piece(ts[i], ts[i + 1]);
    if (i > 0 && merged[i - 1].x && merged[i - 1].y) {
      if (cell_blocks(map, {c.x, prev.y}, h) || cell_blocks(map, {prev.x, c.y}, h)) return true;
    }
    if (cell_blocks(map, c, h)) return true;
    prev = c;
  }
  return false;
}

/// Per-cell mask of cells whose center lies within `radius` of p.
inline std::vector<std::uint8_t> disk_mask(const GridMap& map, Point p, double radius) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(map.width()) * map.height(), 0);
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (std::hypot(x + 0.5 - p.x, y + 0.5 - p.y) <= radius) m[static_cast<std::size_t>(y) * map.width() + x] = 1;
  return m;
}

/// Uniform-cost search by repeated linear scans. Orthogonal steps cost 1 and
/// diagonal ones sqrt(2); a diagonal step needs both orthogonal neighbours
/// walkable; masked cells are never entered (nor used as a source).
inline std::vector<double> ucs(const GridMap& map, Cell source, const std::vector<std::uint8_t>& mask = {}) {
  const int w = map.width(), h = map.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  auto walkable = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && map.cells()[idx(x, y)] != CellKind::Wall;
  };
  auto enterable = [&](int x, int y) { return walkable(x, y) && (mask.empty() || !mask[idx(x, y)]); };
  std::vector<double> dist(n, kInf);
  std::vector<bool> done(n, false);
  if (!enterable(source.x, source.y)) return dist;
  dist[idx(source.x, source.y)] = 0.0;
  for (;;) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && std::isfinite(dist[i]) && (best == n || dist[i] < dist[best])) best = i;
    if (best == n) break;
    done[best] = true;
    const int cx = static_cast<int>(best % w), cy = static_cast<int>(best / w);
    for (int ddy = -1; ddy <= 1; ++ddy)
      for (int ddx = -1; ddx <= 1; ++ddx) {
        if (ddx == 0 && ddy == 0) continue;
        const int nx = cx + ddx, ny = cy + ddy;
        if (!enterable(nx, ny)) continue;
        if (ddx != 0 && ddy != 0 && (!walkable(cx + ddx, cy) || !walkable(cx, cy + ddy))) continue;
        const double cost = (ddx != 0 && ddy != 0) ? std::sqrt(2.0) : 1.0;
        dist[idx(nx, ny)] = std::min(dist[idx(nx, ny)], dist[best] + cost);
      }
  }
  return dist;
}

inline double ucs_length(const GridMap& map, Cell from, Cell to, const std::vector<std::uint8_t>& mask = {}) {
  if (to.x < 0 || to.y < 0 || to.x >= map.width() || to.y >= map.height()) return kInf;
  if (!mask.empty() && mask[static_cast<std::size_t>(to.y) * map.width() + to.x]) return kInf;
  return ucs(map, from, mask)[static_cast<std::size_t>(to.y) * map.width() + to.x];
}

/// 1 when an unrestricted shortest path and a shortest path avoiding the
/// player's exclusion disk have the same length, i.e. some shortest path
/// keeps every waypoint out of the disk.
inline double path_not_near_player(const GridMap& map, Cell npc, Cell post, Point player, double radius) {
  const double full = ucs_length(map, npc, post);
  const double safe = ucs_length(map, npc, post, disk_mask(map, player, radius));
  if (!std::isfinite(full) || !std::isfinite(safe)) return 0.0;
  return std::fabs(full - safe) <= 1e-9 * std::max(1.0, full) ? 1.0 : 0.0;
}

/// Angle between the heading and the direction to q, via acos of the dot product.
inline double offset_angle(const Pose& apex, Point q) {
  const double vx = q.x - apex.position.x, vy = q.y - apex.position.y;
  const double len = std::hypot(vx, vy);
  if (len == 0.0) return 0.0;
  const double c = (vx * std::cos(apex.heading) + vy * std::sin(apex.heading)) / len;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Every map cell whose center is within the radius, within the half-angle
/// of the heading and reachable by a clear crouch ray. Sorted by index.
inline std::vector<Cell> wedge(const GridMap& map, const Pose& apex, double half_angle, double radius) {
  std::vector<Cell> out;
  if (!(radius > 0.0)) return out;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const Point c{x + 0.5, y + 0.5};
      if (std::hypot(c.x - apex.position.x, c.y - apex.position.y) > radius) continue;
      if (offset_angle(apex, c) > half_angle + 1e-9) continue;
      if (ray_blocked(map, apex.position, c, RayHeight::Crouch)) continue;
      out.push_back({x, y});
    }
  return out;
}

inline Pose end_pose(const Pose& p, const MotionPrimitive& m) {
  const double c = std::cos(p.heading), s = std::sin(p.heading);
  const Point d{m.displacement.x * c - m.displacement.y * s, m.displacement.x * s + m.displacement.y * c};
  return Pose({p.position.x + d.x, p.position.y + d.y}, p.heading + m.rotation);
}

/// -1 for an invalid motion, otherwise the number of Unseen cells in the
/// union of the primitive's wedges from its end pose.
inline int primitive_score(const CanvassGrid& grid, const GridMap& map, const Pose& pose, const MotionPrimitive& m) {
  const Pose end = end_pose(pose, m);
  const Point e = end.position;
  if (!(e.x >= 0 && e.y >= 0 && e.x < map.width() && e.y < map.height())) return -1;
  if (cell_blocks(map, {static_cast<int>(std::floor(e.x)), static_cast<int>(std::floor(e.y))}, RayHeight::Stand))
    return -1;
  if (ray_blocked(map, pose.position, e, RayHeight::Stand)) return -1;
  std::vector<Cell> all;
  for (const Wedge& w : m.wedges) {
    auto cells = wedge(map, end, w.half_angle, w.radius);
    all.insert(all.end(), cells.begin(), cells.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  int n = 0;
  for (Cell c : all)
    if (grid.at(c) == CanvassCell::Unseen) ++n;
  return n;
}

/// Best score over the filtered candidate set: valid primitives not in the
/// recency buffer; when that set is empty or tops out at 0 while a recent
/// primitive could still see something, the filter is waived.
inline int filtered_max(std::span<const int> scores, std::span<const MotionPrimitive> prims,
                        const RecencyBuffer& recency) {
  int best = -1, best_all = -1;
  bool recent_progress = false;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    if (scores[i] < 0) continue;
    best_all = std::max(best_all, scores[i]);
    if (recency.contains(prims[i].id)) {
      if (scores[i] > 0) recent_progress = true;
    } else {
      best = std::max(best, scores[i]);
    }
  }
  if (best < 0 || (best == 0 && recent_progress)) return best_all;
  return best;
}

/// Geometric acceptance of the inverse-distance model, written from its definition.
inline bool inverse_cone_sees(double theta_max, double k, double r_max, double d_close, double d, double offset) {
  if (d > r_max) return false;
  const double half = d <= d_close ? theta_max : std::min(theta_max, k / d);
  return offset <= half + 1e-9;
}

/// Would an observer see point q? Geometry from the model definitions, occlusion by standing ray.
inline bool observer_sees(const GridMap& map, const Observer& o, Point q) {
  const double d = std::hypot(q.x - o.pose.position.x, q.y - o.pose.position.y);
  const double off = offset_angle(o.pose, q);
  bool geometric = false;
  if (const auto* c = std::get_if<InverseDistanceCone>(&o.vision)) {
    geometric = !c->blind() && inverse_cone_sees(c->theta_max, c->k, c->r_max, c->d_close, d, off);
  } else {
    for (const ViewCone& vc : std::get<MultiCone>(o.vision).cones)
      if (d <= vc.range && off <= vc.half_angle + 1e-9) geometric = true;
  }
  return geometric && !ray_blocked(map, o.pose.position, q, RayHeight::Stand);
}

/// Received loudness against threshold, straight from the hearing rule.
inline bool hears(const GridMap& map, const HearingModel& h, Point listener, const SoundEvent& e) {
  const double d = std::hypot(listener.x - e.position.x, listener.y - e.position.y);
  const double occl = ray_blocked(map, e.position, listener, RayHeight::Stand) ? h.occlusion_factor : 1.0;
  return e.loudness * occl / std::max(d, 0.001) >= h.threshold;
}

/// Random map with a solid border, walls and low cover at the given densities.
inline GridMap random_map(SplitMix64& rng, int w, int h, double wall, double low) {
  GridMap map(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        map.set({x, y}, CellKind::Wall);
        continue;
      }
      const double u = rng.uniform();
      map.set({x, y}, u < wall ? CellKind::Wall : (u < wall + low ? CellKind::LowCover : CellKind::Free));
    }
  return map;
}

/// True when every walkable cell is reachable from every other one.
inline bool connected(const GridMap& map) {
  Cell first{-1, -1};
  int walkable = 0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (!cell_blocks(map, {x, y}, RayHeight::Stand)) {
        if (first.x < 0) first = {x, y};
        ++walkable;
      }
  if (walkable == 0) return false;
  const auto d = ucs(map, first);
  return std::count_if(d.begin(), d.end(), [](double v) { return std::isfinite(v); }) == walkable;
}

inline std::vector<Cell> cells_of_kind(const GridMap& map, CellKind k) {
  std::vector<Cell> out;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.at({x, y}) == k) out.push_back({x, y});
  return out;
}

}  // namespace oracle
