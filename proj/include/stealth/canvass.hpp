#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "stealth/geometry.hpp"
#include "stealth/world.hpp"

namespace stealth {

enum class CanvassCell : std::uint8_t { Unseen, Seen, BlockedSeen };

/// Logical search grid laid over the disk around the searching agent.
/// Cells outside the disk or under walls are fixed as BlockedSeen; Seen
/// cells never revert during one canvass.
class CanvassGrid {
 public:
  CanvassGrid() = default;
  CanvassGrid(const GridMap& map, const Pose& center, double radius);

  Point origin() const { return origin_; }
  double radius() const { return radius_; }
  Cell min_cell() const { return min_; }
  int span_x() const { return span_x_; }
  int span_y() const { return span_y_; }

  CanvassCell at(Cell c) const;
  /// Unseen -> Seen; other states are left alone. Returns true if it changed.
  bool mark_seen(Cell c);
  int unseen() const { return unseen_; }
  int initial_unseen() const { return initial_unseen_; }
  /// 1 - unseen / initial, or 1 when nothing was ever unseen.
  double coverage() const;
  /// Consecutive committed steps that marked no new cell.
  int idle_steps() const { return idle_steps_; }
  void note_step(int newly_seen) { idle_steps_ = newly_seen > 0 ? 0 : idle_steps_ + 1; }

 private:
  Point origin_;
  double radius_ = 0.0;
  Cell min_{};
  int span_x_ = 0;
  int span_y_ = 0;
  std::vector<CanvassCell> cells_;
  int unseen_ = 0;
  int initial_unseen_ = 0;
  int idle_steps_ = 0;
};

struct Wedge {
  double half_angle = 0.0;
  double radius = 0.0;
};

/// A canned motion: displacement and rotation in the agent's local frame,
/// then the wedges swept from the resulting pose.
struct MotionPrimitive {
  int id = 0;
  Point displacement;
  double rotation = 0.0;
  std::vector<Wedge> wedges;
};

/// Four turn-in-place scans and four step-and-scan moves.
std::vector<MotionPrimitive> default_primitives();

class RecencyBuffer {
 public:
  explicit RecencyBuffer(std::size_t capacity = 3) : capacity_(capacity) {}
  void push(int id);
  bool contains(int id) const;
  std::size_t capacity() const { return capacity_; }
  const std::deque<int>& ids() const { return ids_; }

 private:
  std::size_t capacity_;
  std::deque<int> ids_;
};

CanvassGrid init_canvass(const GridMap& map, const Pose& center, double radius);

Pose apply_motion(const Pose& pose, const MotionPrimitive& primitive);

/// The motion must stay in the map, end outside walls and not pass through a
/// wall; otherwise the primitive is invalid.
bool motion_valid(const GridMap& map, const Pose& pose, const MotionPrimitive& primitive);

/// Distinct cells swept by the primitive's wedges from its end pose.
std::vector<Cell> swept_cells(const GridMap& map, const Pose& pose, const MotionPrimitive& primitive);

/// Number of Unseen cells the primitive would sweep, or -1 if invalid.
int score_primitive(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                    const MotionPrimitive& primitive);

struct CanvassChoice {
  int primitive_id = -1;  // -1 when stalled
  std::size_t index = 0;  // position in the primitive list
  int score = -1;
  Pose pose;              // pose after the motion
  bool stalled = false;   // every primitive invalid; pose unchanged
  bool recency_waived = false;
  bool plateau_escape = false;  // no primitive could see anything new; walked toward unseen cells
  std::vector<int> scores;  // per primitive, in list order
};

/// Greedy pick over precomputed scores: skip recently played primitives,
/// take the highest score and break ties by lowest id. When only recent
/// primitives can still make progress the recency filter is waived.
CanvassChoice choose_primitive(std::span<const int> scores, std::span<const MotionPrimitive> primitives,
                               const RecencyBuffer& recency, const Pose& pose);

/// Committed steps in a row without a new cell after which a canvass gives up.
inline constexpr int kMaxIdleSteps = 32;

/// Walking distance from every cell to the nearest Unseen cell that a wedge
/// could ever mark. LowCover cells are left out: a crouch ray to their center
/// always enters the cover itself, so they stay Unseen for good.
DistanceField unseen_distance(const CanvassGrid& grid, const GridMap& map);

/// choose_primitive, plus an escape from zero plateaus: when the best score is
/// 0 while Unseen cells are still reachable on foot, the valid primitive whose
/// end cell is closest (by walking distance, then straight-line distance to
/// the nearest Unseen cell center, then lowest id) is taken instead of idling.
/// Positive-score choices are never affected.
CanvassChoice choose_canvass_step(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives, std::span<const int> scores,
                                  const RecencyBuffer& recency);

/// Scores every primitive, picks one (choose_canvass_step), marks its wedge
/// cells Seen and records it as played.
CanvassChoice choose_and_apply(CanvassGrid& grid, const GridMap& map, const Pose& pose,
                               std::span<const MotionPrimitive> primitives, RecencyBuffer& recency);

/// Marks the chosen primitive's sweep as seen and records it as played.
int commit_choice(CanvassGrid& grid, const GridMap& map, const Pose& pose_before,
                  std::span<const MotionPrimitive> primitives, const CanvassChoice& choice,
                  RecencyBuffer& recency);

/// True when nothing is left to find: no Unseen cells, or no primitive can
/// see a new cell from here and no markable Unseen cell can be walked to, or
/// kMaxIdleSteps steps in a row have marked nothing.
bool canvass_done(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                  std::span<const MotionPrimitive> primitives);

}  // namespace stealth
