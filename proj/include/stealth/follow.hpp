#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stealth/geometry.hpp"
#include "stealth/perception.hpp"
#include "stealth/world.hpp"

namespace stealth {

/// Annular arc around the player where follow positions may be generated.
/// arc_center is measured from the player heading (pi = directly behind).
struct FollowRegion {
  double r_min = 1.5;
  double r_max = 3.5;
  double arc_center = kPi;
  double arc_half_width = kPi / 2.0;

  bool well_formed() const {
    return r_min > 0.0 && r_max > r_min && arc_half_width > 0.0 && arc_half_width <= kPi;
  }
};

/// Stage at which a candidate stopped; Accepted passed all three ray checks.
enum class FollowStage : std::uint8_t { A, B, C, Accepted };

std::string_view to_string(FollowStage stage);

struct FollowCandidate {
  int bearing_index = 0;
  double bearing = 0.0;
  Point position;
  Point forward_point;
  double score = 0.0;
  FollowStage stage_reached = FollowStage::A;
};

struct FollowScoring {
  Point buddy;
  double ideal_dist = 2.5;
  double w_close = 1.0;
  double w_travel = 0.5;
  double w_behind = 0.75;
};

struct FollowParams {
  FollowRegion region;
  int n_rays = 16;
  double forward_len = 2.0;
  double pullback = 0.25;
};

double score_candidate(const FollowCandidate& candidate, const Pose& player, const FollowScoring& scoring);

/// Accepted candidates first (score descending, ties by bearing index), then
/// rejected ones in bearing order.
std::vector<FollowCandidate> generate_follow_positions(const GridMap& map, const Pose& player,
                                                       const FollowRegion& region, int n_rays,
                                                       double forward_len, const FollowScoring& scoring,
                                                       double pullback = 0.25);

/// Re-checks the three ray contracts for a position against the current player pose.
bool follow_contracts_hold(const GridMap& map, const Pose& player, Point position,
                           double forward_len);

struct Observer {
  Pose pose;
  VisionModel vision;
};

struct TeleportParams {
  int min_ticks = 90;      // consecutive ticks without a usable follow position
  double min_path = 12.0;  // buddy-player path distance that counts as stranded
};

/// Last-resort relocation: only when the buddy has been stranded long enough,
/// and only onto a free cell no observer (enemies and the player) can see.
/// The target is the nearest such cell to the player that the player can walk to.
std::optional<Point> teleport_check(const GridMap& map, Point buddy, const Pose& player,
                                    int accepted_count, int ticks_without_position,
                                    std::span<const Observer> observers, const TeleportParams& params);

}  // namespace stealth
