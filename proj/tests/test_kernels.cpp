#include <doctest.h>

#include "oracles.hpp"
#include "stealth/kernels.hpp"

using namespace stealth;

// The per-module tests compare each kernel against its serial twin on the
// module's own fixtures; these cases stress the batch shapes themselves.

TEST_CASE("kernels handle empty batches") {
  const GridMap m(5, 5);
  const SelectionContext ctx = make_context(m, Pose({1.5, 1.5}, 0.0), Pose({3.5, 3.5}, 0.0), PostsConfig{});
  CHECK(kernels::validate_posts(m, {}, ctx).empty());
  CHECK(kernels::rate_posts(*find_selector("hide"), {}, ctx, CriterionRegistry::defaults()).empty());
  CHECK(kernels::observed_mask(m, {}, {}).empty());
  const std::vector<Point> pts{{1.5, 1.5}};
  CHECK(kernels::observed_mask(m, {}, pts) == std::vector<std::uint8_t>{0});
  CHECK(kernels::score_primitives(CanvassGrid(m, Pose({2.5, 2.5}, 0.0), 2.0), m, Pose({2.5, 2.5}, 0.0), {}).empty());
  CHECK(kernels::thread_count() >= 1);
}

TEST_CASE("parallel observed mask is identical to the serial one on large batches") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const GridMap m = oracle::random_map(rng, 40, 40, 0.08, 0.08);
    std::vector<Observer> obs;
    for (int i = 0; i < 6; ++i)
      obs.push_back({Pose({1.0 + rng.uniform() * 38.0, 1.0 + rng.uniform() * 38.0}, rng.uniform() * kTwoPi),
                     InverseDistanceCone{}});
    std::vector<Point> pts;
    for (int i = 0; i < 3000; ++i) pts.push_back({rng.uniform() * 40.0, rng.uniform() * 40.0});
    CHECK(kernels::observed_mask(m, obs, pts) == kernels::serial::observed_mask(m, obs, pts));
  }
}

TEST_CASE("parallel post rating keeps the serial order, including ties") {
  // a symmetric room produces many equal ratings; the order must still match
  const GridMap m(21, 21);
  SelectionContext ctx = make_context(m, Pose({10.5, 10.5}, 0.0), Pose({10.5, 15.5}, kPi / 2.0), PostsConfig{});
  ctx.config.max_open = 400;
  prepare_paths(ctx);
  const auto posts = kernels::serial::validate_posts(m, generate_posts(m, ctx), ctx);
  for (const auto& sel : default_selectors()) {
    const auto a = kernels::rate_posts(sel, posts, ctx, CriterionRegistry::defaults());
    const auto b = kernels::serial::rate_posts(sel, posts, ctx, CriterionRegistry::defaults());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].post_id == b[i].post_id);
      CHECK(a[i].values == b[i].values);
    }
  }
}
