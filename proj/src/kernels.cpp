#include "stealth/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stealth::kernels {

namespace {

PostRating rate_one(const std::vector<const Criterion*>& criteria, const EvaluatedPost& p,
                    const SelectionContext& ctx) {
  PostRating r;
  r.post_id = p.post.id;
  r.rating = 1.0;
  r.values.reserve(criteria.size());
  for (const Criterion* c : criteria) {
    const double v = c->evaluate(p, ctx);
    r.values.push_back(v);
    r.rating *= v;
  }
  return r;
}

std::vector<const Criterion*> resolve(const PostSelector& selector, const CriterionRegistry& registry) {
  std::vector<const Criterion*> out;
  for (const auto& id : selector.criteria) {
    const Criterion* c = registry.find(id);
    if (!c) throw std::invalid_argument("selector '" + selector.name + "' names unknown criterion '" + id + "'");
    out.push_back(c);
  }
  return out;
}

void sort_ratings(std::vector<PostRating>& ratings) {
  std::sort(ratings.begin(), ratings.end(), [](const PostRating& a, const PostRating& b) {
    return a.rating != b.rating ? a.rating > b.rating : a.post_id < b.post_id;
  });
}

std::vector<std::size_t> valid_indices(std::span<const EvaluatedPost> posts) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < posts.size(); ++i)
    if (posts[i].validation.valid) idx.push_back(i);
  return idx;
}

bool seen_by_any(const GridMap& map, std::span<const Observer> observers, Point p) {
  for (const auto& o : observers)
    if (can_see(o.vision, map, o.pose, p)) return true;
  return false;
}

}  // namespace

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<int> score_primitives(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives) {
  std::vector<int> scores(primitives.size(), -1);
  const auto n = static_cast<std::ptrdiff_t>(primitives.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    scores[static_cast<std::size_t>(i)] = score_primitive(grid, map, pose, primitives[static_cast<std::size_t>(i)]);
  return scores;
}

std::vector<EvaluatedPost> validate_posts(const GridMap& map, std::span<const Post> posts,
                                          const SelectionContext& ctx) {
  std::vector<EvaluatedPost> out(posts.size());
  const auto n = static_cast<std::ptrdiff_t>(posts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = EvaluatedPost{posts[k], validate_post(map, posts[k], ctx)};
  }
  return out;
}

std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx, const CriterionRegistry& registry) {
  const auto criteria = resolve(selector, registry);
  const auto idx = valid_indices(posts);
  std::vector<PostRating> ratings(idx.size());
  const auto n = static_cast<std::ptrdiff_t>(idx.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    ratings[k] = rate_one(criteria, posts[idx[k]], ctx);
  }
  sort_ratings(ratings);
  return ratings;
}

std::vector<std::uint8_t> observed_mask(const GridMap& map, std::span<const Observer> observers,
                                        std::span<const Point> points) {
  std::vector<std::uint8_t> seen(points.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    seen[k] = seen_by_any(map, observers, points[k]) ? 1 : 0;
  }
  return seen;
}

namespace serial {

std::vector<int> score_primitives(const CanvassGrid& grid, const GridMap& map, const Pose& pose,
                                  std::span<const MotionPrimitive> primitives) {
  std::vector<int> scores;
  scores.reserve(primitives.size());
  for (const auto& p : primitives) scores.push_back(score_primitive(grid, map, pose, p));
  return scores;
}

std::vector<EvaluatedPost> validate_posts(const GridMap& map, std::span<const Post> posts,
                                          const SelectionContext& ctx) {
  std::vector<EvaluatedPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts) out.push_back({p, validate_post(map, p, ctx)});
  return out;
}

std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx, const CriterionRegistry& registry) {
  const auto criteria = resolve(selector, registry);
  std::vector<PostRating> ratings;
  for (const auto& p : posts)
    if (p.validation.valid) ratings.push_back(rate_one(criteria, p, ctx));
  sort_ratings(ratings);
  return ratings;
}

std::vector<std::uint8_t> observed_mask(const GridMap& map, std::span<const Observer> observers,
                                        std::span<const Point> points) {
  std::vector<std::uint8_t> seen;
  seen.reserve(points.size());
  for (const Point p : points) seen.push_back(seen_by_any(map, observers, p) ? 1 : 0);
  return seen;
}

}  // namespace serial

}  // namespace stealth::kernels
