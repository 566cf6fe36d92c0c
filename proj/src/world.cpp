#include "stealth/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace stealth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kCornerEps = 1e-9;

struct Step {
  int dx, dy;
  double cost;
};

// E, N, W, S, NE, NW, SW, SE
constexpr Step kSteps[8] = {{1, 0, 1.0},      {0, 1, 1.0},     {-1, 0, 1.0},
                            {0, -1, 1.0},     {1, 1, kSqrt2},  {-1, 1, kSqrt2},
                            {-1, -1, kSqrt2}, {1, -1, kSqrt2}};

bool forbidden_at(const CellMask& mask, std::size_t i) { return !mask.empty() && mask[i] != 0; }

bool can_step(const GridMap& map, Cell from, const Step& s, const CellMask& forbidden) {
  const Cell to{from.x + s.dx, from.y + s.dy};
  if (!map.passable(to) || forbidden_at(forbidden, map.index(to))) return false;
  if (s.dx != 0 && s.dy != 0) {
    // no corner cutting past walls
    if (!map.passable({from.x + s.dx, from.y}) || !map.passable({from.x, from.y + s.dy}))
      return false;
  }
  return true;
}

int start_coord(double v, double d) {
  double f = std::floor(v);
  if (d < 0.0 && f == v) f -= 1.0;
  return static_cast<int>(f);
}

double octile(Cell a, Cell b) {
  const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  const int lo = std::min(dx, dy), hi = std::max(dx, dy);
  return lo * kSqrt2 + (hi - lo);
}

}  // namespace

GridMap::GridMap(int width, int height, CellKind fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("map dimensions must be >= 1");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GridMap::GridMap(int width, int height, std::vector<CellKind> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width < 1 || height < 1) throw std::invalid_argument("map dimensions must be >= 1");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("cell array length must equal width * height");
}

RayHit raycast(const GridMap& map, Point from, Point to, RayHeight height) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  auto blocked = [&](Cell c) { return !map.in_bounds(c) || map.blocks(c, height); };
  auto hit = [&](double t, Cell c, std::optional<double> fx, std::optional<double> fy) {
    Point p{from.x + t * dx, from.y + t * dy};
    if (fx) p.x = *fx;
    if (fy) p.y = *fy;
    return RayHit{RayOutcome::Blocked, p, c};
  };

  Cell c{start_coord(from.x, dx), start_coord(from.y, dy)};
  if (blocked(c)) return RayHit{RayOutcome::Blocked, from, c};

  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  // Crossing parameters are computed from the boundary coordinate each time
  // rather than accumulated, so an endpoint lying exactly on a boundary gives
  // t == 1 exactly and is never mistaken for entering the next cell.
  auto next_x = [&] { return step_x != 0 ? ((step_x > 0 ? c.x + 1.0 : c.x) - from.x) / dx : kInf; };
  auto next_y = [&] { return step_y != 0 ? ((step_y > 0 ? c.y + 1.0 : c.y) - from.y) / dy : kInf; };

  while (true) {
    const double t_max_x = next_x();
    const double t_max_y = next_y();
    const double t = std::min(t_max_x, t_max_y);
    if (t >= 1.0) return {};
    const double boundary_x = step_x > 0 ? c.x + 1.0 : c.x;
    const double boundary_y = step_y > 0 ? c.y + 1.0 : c.y;
    if (std::fabs(t_max_x - t_max_y) <= kCornerEps) {
      const Cell side_x{c.x + step_x, c.y};
      const Cell side_y{c.x, c.y + step_y};
      if (blocked(side_x)) return hit(t, side_x, boundary_x, boundary_y);
      if (blocked(side_y)) return hit(t, side_y, boundary_x, boundary_y);
      c = {c.x + step_x, c.y + step_y};
      if (blocked(c)) return hit(t, c, boundary_x, boundary_y);
    } else if (t_max_x < t_max_y) {
      c.x += step_x;
      if (blocked(c)) return hit(t, c, boundary_x, std::nullopt);
    } else {
      c.y += step_y;
      if (blocked(c)) return hit(t, c, std::nullopt, boundary_y);
    }
  }
}

PathResult find_path(const GridMap& map, Point from, Point to, const CellMask& forbidden) {
  const Cell start = cell_of(from);
  const Cell goal = cell_of(to);
  if (!map.passable(start) || !map.passable(goal)) return {};
  if (forbidden_at(forbidden, map.index(start)) || forbidden_at(forbidden, map.index(goal)))
    return {};

  const std::size_t n = map.cell_count();
  std::vector<double> g(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  struct Entry {
    double f;
    std::size_t index;
    bool operator>(const Entry& o) const { return f != o.f ? f > o.f : index > o.index; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const std::size_t start_i = map.index(start);
  const std::size_t goal_i = map.index(goal);
  g[start_i] = 0.0;
  open.push({octile(start, goal), start_i});

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == goal_i) break;
    const Cell c = map.cell_at_index(top.index);
    for (const Step& s : kSteps) {
      if (!can_step(map, c, s, forbidden)) continue;
      const Cell nb{c.x + s.dx, c.y + s.dy};
      const std::size_t ni = map.index(nb);
      if (closed[ni]) continue;
      const double cand = g[top.index] + s.cost;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = static_cast<std::int64_t>(top.index);
        open.push({cand + octile(nb, goal), ni});
      }
    }
  }

  if (!closed[goal_i]) return {};

  PathResult result;
  result.outcome = PathOutcome::Found;
  result.length = g[goal_i];
  for (std::int64_t i = static_cast<std::int64_t>(goal_i); i >= 0; i = parent[static_cast<std::size_t>(i)])
    result.waypoints.push_back(cell_center(map.cell_at_index(static_cast<std::size_t>(i))));
  std::reverse(result.waypoints.begin(), result.waypoints.end());
  return result;
}

DistanceField::DistanceField(const GridMap& map, Cell source, const CellMask& forbidden)
    : DistanceField(map, std::span<const Cell>(&source, 1), forbidden) {}

DistanceField::DistanceField(const GridMap& map, std::span<const Cell> sources, const CellMask& forbidden)
    : width_(map.width()), height_(map.height()) {
  dist_.assign(map.cell_count(), kInf);
  if (!sources.empty()) source_ = sources.front();

  struct Entry {
    double d;
    std::size_t index;
    bool operator>(const Entry& o) const { return d != o.d ? d > o.d : index > o.index; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<std::uint8_t> closed(map.cell_count(), 0);
  for (const Cell source : sources) {
    if (!map.passable(source) || forbidden_at(forbidden, map.index(source))) continue;
    dist_[map.index(source)] = 0.0;
    open.push({0.0, map.index(source)});
  }
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    const Cell c = map.cell_at_index(top.index);
    for (const Step& s : kSteps) {
      if (!can_step(map, c, s, forbidden)) continue;
      const std::size_t ni = map.index({c.x + s.dx, c.y + s.dy});
      const double cand = top.d + s.cost;
      if (cand < dist_[ni]) {
        dist_[ni] = cand;
        open.push({cand, ni});
      }
    }
  }
}

double DistanceField::at(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) return kInf;
  return dist_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x)];
}

bool DistanceField::reachable(Cell c) const { return std::isfinite(at(c)); }

std::vector<Cell> cells_in_wedge(const GridMap& map, const Pose& apex, double half_angle,
                                 double radius) {
  std::vector<Cell> out;
  if (!(radius > 0.0)) return out;
  const Point p = apex.position;
  const int x0 = std::max(0, static_cast<int>(std::floor(p.x - radius)));
  const int x1 = std::min(map.width() - 1, static_cast<int>(std::floor(p.x + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(p.y - radius)));
  const int y1 = std::min(map.height() - 1, static_cast<int>(std::floor(p.y + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Cell c{x, y};
      const Point center = cell_center(c);
      if (distance(center, p) > radius) continue;
      if (offset_from_heading(apex, center) > half_angle + kAngleEps) continue;
      if (!line_clear(map, p, center, RayHeight::Crouch)) continue;
      out.push_back(c);
    }
  }
  return out;
}

GridMap map_from_rows(const std::vector<std::string>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty map");
  const int w = static_cast<int>(rows.front().size());
  const int h = static_cast<int>(rows.size());
  GridMap map(w, h);
  for (int r = 0; r < h; ++r) {
    if (static_cast<int>(rows[r].size()) != w) throw std::invalid_argument("ragged map rows");
    for (int x = 0; x < w; ++x) {
      const char ch = rows[r][x];
      CellKind k;
      switch (ch) {
        case '#': k = CellKind::Wall; break;
        case '~': k = CellKind::LowCover; break;
        case '.': k = CellKind::Free; break;
        default: throw std::invalid_argument(std::string("unknown map glyph '") + ch + "'");
      }
      map.set({x, h - 1 - r}, k);
    }
  }
  return map;
}

}  // namespace stealth
