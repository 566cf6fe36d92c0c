#include "stealth/canvass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stealth/kernels.hpp"

namespace stealth {

CanvassGrid::CanvassGrid(const GridMap& map, const Pose& center, double radius)
    : origin_(center.position), radius_(radius) {
  const Point p = center.position;
  min_ = {static_cast<int>(std::floor(p.x - radius)), static_cast<int>(std::floor(p.y - radius))};
  const Cell max{static_cast<int>(std::floor(p.x + radius)),
                 static_cast<int>(std::floor(p.y + radius))};
  span_x_ = max.x - min_.x + 1;
  span_y_ = max.y - min_.y + 1;
  cells_.assign(static_cast<std::size_t>(span_x_) * static_cast<std::size_t>(span_y_),
                CanvassCell::BlockedSeen);
  for (int j = 0; j < span_y_; ++j) {
    for (int i = 0; i < span_x_; ++i) {
      const Cell c{min_.x + i, min_.y + j};
      if (!map.in_bounds(c) || map.at(c) == CellKind::Wall) continue;
      if (distance(cell_center(c), p) > radius) continue;
      cells_[static_cast<std::size_t>(j) * span_x_ + i] = CanvassCell::Unseen;
      ++unseen_;
    }
  }
  initial_unseen_ = unseen_;
}

CanvassCell CanvassGrid::at(Cell c) const {
  const int i = c.x - min_.x, j = c.y - min_.y;
  if (i < 0 || j < 0 || i >= span_x_ || j >= span_y_) return CanvassCell::BlockedSeen;
  return cells_[static_cast<std::size_t>(j) * span_x_ + i];
}

bool CanvassGrid::mark_seen(Cell c) {
  const int i = c.x - min_.x, j = c.y - min_.y;
  if (i < 0 || j < 0 || i >= span_x_ || j >= span_y_) return false;
  auto& cell = cells_[static_cast<std::size_t>(j) * span_x_ + i];
  if (cell != CanvassCell::Unseen) return false;
  cell = CanvassCell::Seen;
  --unseen_;
  return true;
}

double CanvassGrid::coverage() const {
  if (initial_unseen_ == 0) return 1.0;
  return 1.0 - static_cast<double>(unseen_) / initial_unseen_;
}

std::vector<MotionPrimitive> default_primitives() {
  const double d45 = kPi / 4.0, d60 = kPi / 3.0, d90 = kPi / 2.0;
  const Wedge turn_scan{d60, 2.5};
  const Wedge step_scan{d45, 2.0};
  auto step = [&](int id, double bearing) {
    return MotionPrimitive{id, unit_from_angle(bearing) * 1.5, bearing, {step_scan}};
  };
  return {
      MotionPrimitive{0, {}, d45, {turn_scan}},
      MotionPrimitive{1, {}, -d45, {turn_scan}},
      MotionPrimitive{2, {}, d90, {turn_scan}},
      MotionPrimitive{3, {}, -d90, {turn_scan}},
      step(4, 0.0),
      step(5, d60),
      step(6, -d60),
      step(7, kPi),
  };
}

void RecencyBuffer::push(int id) {
  if (capacity_ == 0) return;
  ids_.push_back(id);
  while (ids_.size() > capacity_) ids_.pop_front();
}

bool RecencyBuffer::contains(int id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

CanvassGrid init_canvass(const GridMap& map, const Pose& center, double radius) {
  return CanvassGrid(map, center, radius);
}

Pose apply_motion(const Pose& pose, const MotionPrimitive& primitive) {
  return Pose{pose.position + rotate(primitive.displacement, pose.heading),
              pose.heading + primitive.rotation};
}

bool motion_valid(const GridMap& map, const Pose& pose, const MotionPrimitive& primitive) {
  const Pose end = apply_motion(pose, primitive);
  if (!map.contains(end.position)) return false;
  if (map.at(cell_of(end.position)) == CellKind::Wall) return false;
  return line_clear(map, pose.position, end.position, RayHeight::Stand);
}

std::vector<Cell> swept_cells(const GridMap& map, const Pose& pose, const MotionPrimitive& primitive) {
  const Pose end = apply_motion(pose, primitive);
  std::vector<Cell> out;
  for (const Wedge& w : primitive.wedges) {
    auto cells = cells_in_wedge(map, end, w.half_angle, w.radius);
    out.insert(out.end(), cells.begin(), cells.end());
  }
  std::sort(out.begin(), out.end(), [&](Cell a, Cell b) { return map.index(a) < map.index(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int score_primitive(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                    const MotionPrimitive& primitive) {
  if (!motion_valid(map, pose, primitive)) return -1;
  int score = 0;
  for (const Cell c : swept_cells(map, pose, primitive))
    if (grid.at(c) == CanvassCell::Unseen) ++score;
  return score;
}

CanvassChoice choose_primitive(std::span<const int> scores, std::span<const MotionPrimitive> primitives,
                               const RecencyBuffer& recency, const Pose& pose) {
  CanvassChoice choice;
  choice.pose = pose;
  choice.scores.assign(scores.begin(), scores.end());

  auto pick = [&](bool use_recency) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < primitives.size(); ++i) {
      if (scores[i] < 0) continue;
      if (use_recency && recency.contains(primitives[i].id)) continue;
      if (!best || scores[i] > scores[*best] ||
          (scores[i] == scores[*best] && primitives[i].id < primitives[*best].id))
        best = i;
    }
    return best;
  };

  std::optional<std::size_t> best = pick(true);
  if (!best || scores[*best] == 0) {
    bool excluded_progress = false;
    for (std::size_t i = 0; i < primitives.size(); ++i)
      if (scores[i] > 0 && recency.contains(primitives[i].id)) excluded_progress = true;
    // Only recent primitives remain (or only they make progress): liveness wins.
    if (excluded_progress || !best) {
      best = pick(false);
      choice.recency_waived = best.has_value();
    }
  }

  if (!best) {
    choice.stalled = true;
    return choice;
  }
  choice.index = *best;
  choice.primitive_id = primitives[*best].id;
  choice.score = scores[*best];
  choice.pose = apply_motion(pose, primitives[*best]);
  return choice;
}

int commit_choice(CanvassGrid& grid, const GridMap& map, const Pose& pose_before,
                  std::span<const MotionPrimitive> primitives, const CanvassChoice& choice,
                  RecencyBuffer& recency) {
  if (choice.stalled) return 0;
  int marked = 0;
  for (const Cell c : swept_cells(map, pose_before, primitives[choice.index]))
    if (grid.mark_seen(c)) ++marked;
  recency.push(choice.primitive_id);
  grid.note_step(marked);
  return marked;
}

DistanceField unseen_distance(const CanvassGrid& grid, const GridMap& map) {
  std::vector<Cell> unseen;
  for (int y = 0; y < grid.span_y(); ++y)
    for (int x = 0; x < grid.span_x(); ++x) {
      const Cell c{grid.min_cell().x + x, grid.min_cell().y + y};
      if (grid.at(c) == CanvassCell::Unseen && map.at(c) != CellKind::LowCover) unseen.push_back(c);
    }
  return DistanceField(map, unseen);
}

CanvassChoice choose_canvass_step(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives, std::span<const int> scores,
                                  const RecencyBuffer& recency) {
  CanvassChoice choice = choose_primitive(scores, primitives, recency, pose);
  if (choice.stalled || choice.score > 0 || grid.unseen() == 0) return choice;

  const DistanceField field = unseen_distance(grid, map);
  std::vector<Point> unseen_centers;
  for (int y = 0; y < grid.span_y(); ++y)
    for (int x = 0; x < grid.span_x(); ++x) {
      const Cell c{grid.min_cell().x + x, grid.min_cell().y + y};
      if (grid.at(c) == CanvassCell::Unseen && map.at(c) != CellKind::LowCover) unseen_centers.push_back(cell_center(c));
    }

  std::optional<std::size_t> best;
  double best_walk = 0.0, best_line = 0.0;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (scores[i] < 0) continue;
    const Point end = apply_motion(pose, primitives[i]).position;
    const double walk = field.at(cell_of(end));
    if (!std::isfinite(walk)) continue;
    double line = std::numeric_limits<double>::infinity();
    for (const Point u : unseen_centers) line = std::min(line, distance(end, u));
    const bool better = !best || walk < best_walk || (walk == best_walk && line < best_line) ||
                        (walk == best_walk && line == best_line && primitives[i].id < primitives[*best].id);
    if (better) {
      best = i;
      best_walk = walk;
      best_line = line;
    }
  }
  if (!best) return choice;  // nothing reachable: the plain greedy result stands
  choice.index = *best;
  choice.primitive_id = primitives[*best].id;
  choice.score = scores[*best];
  choice.pose = apply_motion(pose, primitives[*best]);
  choice.recency_waived = recency.contains(choice.primitive_id);
  choice.plateau_escape = true;
  return choice;
}

CanvassChoice choose_and_apply(CanvassGrid& grid, const GridMap& map, const Pose& pose,
                               std::span<const MotionPrimitive> primitives, RecencyBuffer& recency) {
  const std::vector<int> scores = kernels::score_primitives(grid, map, pose, primitives);
  CanvassChoice choice = choose_canvass_step(grid, map, pose, primitives, scores, recency);
  commit_choice(grid, map, pose, primitives, choice, recency);
  return choice;
}

bool canvass_done(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                  std::span<const MotionPrimitive> primitives) {
  if (grid.unseen() == 0 || grid.idle_steps() >= kMaxIdleSteps) return true;
  const std::vector<int> scores = kernels::score_primitives(grid, map, pose, primitives);
  if (std::any_of(scores.begin(), scores.end(), [](int s) { return s > 0; })) return false;
  return !unseen_distance(grid, map).reachable(cell_of(pose.position));
}

}  // namespace stealth
