#pragma once

// Data-parallel batch kernels. Each has a serial twin in kernels::serial that
// is kept as the reference for tests and benchmarks; outputs are written by
// index so both produce identical results regardless of thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "stealth/canvass.hpp"
#include "stealth/follow.hpp"
#include "stealth/posts.hpp"
#include "stealth/world.hpp"

namespace stealth::kernels {

std::vector<int> score_primitives(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives);

std::vector<EvaluatedPost> validate_posts(const GridMap& map, std::span<const Post> posts,
                                          const SelectionContext& ctx);

std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx, const CriterionRegistry& registry);

/// 1 where any observer can see the point.
std::vector<std::uint8_t> observed_mask(const GridMap& map, std::span<const Observer> observers,
                                        std::span<const Point> points);

int thread_count();

namespace serial {

std::vector<int> score_primitives(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives);

std::vector<EvaluatedPost> validate_posts(const GridMap& map, std::span<const Post> posts,
                                          const SelectionContext& ctx);

std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx, const CriterionRegistry& registry);

std::vector<std::uint8_t> observed_mask(const GridMap& map, std::span<const Observer> observers,
                                        std::span<const Point> points);

}  // namespace serial

}  // namespace stealth::kernels
