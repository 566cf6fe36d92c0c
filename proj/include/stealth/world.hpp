#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stealth/geometry.hpp"

namespace stealth {

enum class CellKind : std::uint8_t { Free, LowCover, Wall };

/// Crouch-height rays stop at low cover and walls, standing rays only at walls.
enum class RayHeight : std::uint8_t { Stand, Crouch };

/// Dense grid of unit cells. Cell (i, j) spans [i, i+1) x [j, j+1); +y is north.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, CellKind fill = CellKind::Free);
  GridMap(int width, int height, std::vector<CellKind> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool contains(Point p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width_ && p.y < height_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at_index(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  /// Out-of-bounds cells read as Wall.
  CellKind at(Cell c) const { return in_bounds(c) ? cells_[index(c)] : CellKind::Wall; }
  void set(Cell c, CellKind kind) { cells_.at(index(c)) = kind; }

  bool blocks(Cell c, RayHeight h) const {
    const CellKind k = at(c);
    return k == CellKind::Wall || (h == RayHeight::Crouch && k == CellKind::LowCover);
  }
  /// Walkable: inside the map and not a wall. Low cover can be crossed.
  bool passable(Cell c) const { return in_bounds(c) && cells_[index(c)] != CellKind::Wall; }

  std::span<const CellKind> cells() const { return cells_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellKind> cells_;
};

enum class RayOutcome : std::uint8_t { Clear, Blocked };

struct RayHit {
  RayOutcome outcome = RayOutcome::Clear;
  std::optional<Point> hit_point;  // entry point of the first blocking cell
  std::optional<Cell> hit_cell;    // may lie outside the map when the ray left it

  bool clear() const { return outcome == RayOutcome::Clear; }
  bool blocked() const { return outcome == RayOutcome::Blocked; }
};

/// Exact cell walk from `from` to `to`. A segment passing exactly through a
/// cell corner is blocked if either side cell of that corner blocks, so rays
/// never slip between diagonally touching obstacles. Endpoints lying exactly
/// on a cell boundary belong to the cell the segment actually enters, which
/// keeps the traversal symmetric under reversal.
RayHit raycast(const GridMap& map, Point from, Point to, RayHeight height);

inline bool line_clear(const GridMap& map, Point from, Point to, RayHeight height) {
  return raycast(map, from, to, height).clear();
}

enum class PathOutcome : std::uint8_t { Found, NoPath };

struct PathResult {
  PathOutcome outcome = PathOutcome::NoPath;
  std::vector<Point> waypoints;  // cell centers, start cell first
  double length = 0.0;

  bool found() const { return outcome == PathOutcome::Found; }
};

/// Per-cell mask of cells a search must not enter (1 = forbidden). Empty means none.
using CellMask = std::vector<std::uint8_t>;

/// 8-connected A* with octile heuristic. Orthogonal steps cost 1, diagonal
/// steps sqrt(2); diagonals need both orthogonal neighbours walkable.
/// Neighbour expansion order is E, N, W, S, NE, NW, SW, SE and the open list
/// is ordered by (f, cell index), so results are reproducible.
PathResult find_path(const GridMap& map, Point from, Point to, const CellMask& forbidden = {});

/// Single-source shortest distances under the same step costs and corner rule
/// as find_path. Unreachable cells hold +infinity.
class DistanceField {
 public:
  DistanceField() = default;
  DistanceField(const GridMap& map, Cell source, const CellMask& forbidden = {});
  /// Distance to the nearest of several sources. Steps are symmetric, so this
  /// also reads as the distance from each cell to its closest source.
  DistanceField(const GridMap& map, std::span<const Cell> sources, const CellMask& forbidden = {});

  double at(Cell c) const;
  bool reachable(Cell c) const;
  Cell source() const { return source_; }

 private:
  int width_ = 0;
  int height_ = 0;
  Cell source_{};
  std::vector<double> dist_;
};

/// Cells whose centers are within `radius`, within `half_angle` of the apex
/// heading and visible from the apex by a crouch-height ray. Sorted by cell
/// index. A non-positive radius sweeps nothing.
std::vector<Cell> cells_in_wedge(const GridMap& map, const Pose& apex, double half_angle,
                                 double radius);

/// Parses rows of '#', '~', '.' (top row is the northern edge). Other
/// characters are rejected; the scenario loader handles spawn glyphs itself.
GridMap map_from_rows(const std::vector<std::string>& rows);

}  // namespace stealth
