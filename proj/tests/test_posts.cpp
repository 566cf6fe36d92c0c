#include <doctest.h>

#include "oracles.hpp"
#include "stealth/kernels.hpp"
#include "stealth/posts.hpp"

using namespace stealth;

namespace {

struct Fixture {
  GridMap map;
  SelectionContext ctx;
  std::vector<EvaluatedPost> posts;
};

Fixture random_fixture(SplitMix64& rng, int w, int h, bool cached) {
  Fixture f;
  f.map = oracle::random_map(rng, w, h, 0.12, 0.15);
  const auto free = oracle::cells_of_kind(f.map, CellKind::Free);
  auto pick = [&] { return free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free.size()) - 1))]; };
  const Pose npc(cell_center(pick()), rng.uniform() * kTwoPi);
  const Pose player(cell_center(pick()), rng.uniform() * kTwoPi);
  f.ctx = make_context(f.map, npc, player, PostsConfig{});
  if (rng.uniform() < 0.5) f.ctx.allies.push_back(cell_center(pick()));
  if (rng.uniform() < 0.5) f.ctx.recent_posts.push_back(pick());
  if (cached) prepare_paths(f.ctx);
  for (const Post& p : generate_posts(f.map, f.ctx)) f.posts.push_back({p, validate_post(f.map, p, f.ctx)});
  return f;
}

}  // namespace

TEST_CASE("generation caps: at most 20 cover and 20 open posts, ids dense") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Fixture f = random_fixture(rng, 30, 20, false);
    int cover = 0, open = 0;
    for (std::size_t i = 0; i < f.posts.size(); ++i) {
      CHECK(f.posts[i].post.id == static_cast<int>(i));
      CHECK(f.map.at(f.posts[i].post.cell) == CellKind::Free);
      (f.posts[i].post.kind == PostKind::Cover ? cover : open)++;
    }
    CHECK(cover <= 20);
    CHECK(open <= 20);
  }
}

TEST_CASE("cover posts sit next to cover on the side facing away from the threat") {
  SplitMix64 rng(2);
  const Fixture f = random_fixture(rng, 24, 24, false);
  for (const auto& e : f.posts) {
    if (e.post.kind != PostKind::Cover) continue;
    const Cell cover_cell{e.post.cell.x - static_cast<int>(e.post.cover_normal.x),
                          e.post.cell.y - static_cast<int>(e.post.cover_normal.y)};
    CHECK(f.map.at(cover_cell) == e.post.source_cover);
    CHECK(dot(e.post.cover_normal, f.ctx.threat - e.post.position) < 0.0);
  }
}

TEST_CASE("validation casts exactly four rays that agree with the oracle") {
  SplitMix64 rng(3);
  int mismatches = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Fixture f = random_fixture(rng, 20, 20, false);
    for (const auto& e : f.posts) {
      CHECK(e.validation.rays.size() == static_cast<std::size_t>(kRaysPerPost));
      const Point t = f.ctx.threat;
      const Point exp_from = e.post.kind == PostKind::Cover
                                 ? e.post.position + e.post.cover_normal * f.ctx.config.exposure_offset
                                 : e.post.position;
      const bool stand = !oracle::ray_blocked(f.map, e.post.position, t, RayHeight::Stand);
      const bool crouch = !oracle::ray_blocked(f.map, e.post.position, t, RayHeight::Crouch);
      const bool approach = !oracle::ray_blocked(f.map, f.ctx.npc.position, e.post.position, RayHeight::Crouch);
      const bool exposure = !oracle::ray_blocked(f.map, exp_from, t, RayHeight::Crouch);
      const auto& v = e.validation;
      if (v.ray(RayPurpose::ThreatStand).outcome != (stand ? RayOutcome::Clear : RayOutcome::Blocked)) ++mismatches;
      if (v.ray(RayPurpose::ThreatCrouch).outcome != (crouch ? RayOutcome::Clear : RayOutcome::Blocked)) ++mismatches;
      if (v.ray(RayPurpose::Approach).outcome != (approach ? RayOutcome::Clear : RayOutcome::Blocked)) ++mismatches;
      if (v.ray(RayPurpose::Exposure).outcome != (exposure ? RayOutcome::Clear : RayOutcome::Blocked)) ++mismatches;
      const bool expect_valid =
          e.post.kind == PostKind::Cover ? (approach && !crouch && stand) : (approach && crouch);
      if (v.valid != expect_valid) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("cover post behind low cover: crouch blocked, stand clear") {
  const GridMap m = map_from_rows({"#########",
                                   "#.......#",
                                   "#..~....#",
                                   "#.......#",
                                   "#########"});
  const Pose npc({1.5, 2.5}, 0.0);
  const Pose player({7.5, 2.5}, kPi);
  SelectionContext ctx = make_context(m, npc, player, PostsConfig{});
  const auto posts = generate_posts(m, ctx);
  const auto it = std::find_if(posts.begin(), posts.end(), [](const Post& p) { return p.cell == Cell{2, 2}; });
  REQUIRE(it != posts.end());
  CHECK(it->kind == PostKind::Cover);
  const PostValidation v = validate_post(m, *it, ctx);
  CHECK(v.ray(RayPurpose::ThreatStand).outcome == RayOutcome::Clear);
  CHECK(v.ray(RayPurpose::ThreatCrouch).outcome == RayOutcome::Blocked);
  CHECK(v.valid);
}

TEST_CASE("rating is the product of the recorded criterion values") {
  SplitMix64 rng(4);
  const auto& reg = CriterionRegistry::defaults();
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Fixture f = random_fixture(rng, 20, 16, trial % 2 == 0);
    for (const PostSelector& sel : default_selectors()) {
      REQUIRE(selector_resolves(sel, reg));
      const auto ratings = rate_posts(sel, f.posts, f.ctx, reg);
      for (std::size_t i = 0; i < ratings.size(); ++i) {
        const auto& r = ratings[i];
        REQUIRE(r.values.size() == sel.criteria.size());
        double product = 1.0;
        for (std::size_t k = 0; k < sel.criteria.size(); ++k) {
          CHECK(r.values[k] == reg.find(sel.criteria[k])->evaluate(f.posts[static_cast<std::size_t>(r.post_id)], f.ctx));
          product *= r.values[k];
        }
        CHECK(std::fabs(r.rating - product) <= 1e-9 * std::max(1.0, std::fabs(product)));
        CHECK(f.posts[static_cast<std::size_t>(r.post_id)].validation.valid);
        if (i > 0) {
          CHECK(ratings[i - 1].rating >= r.rating);
          if (ratings[i - 1].rating == r.rating) CHECK(ratings[i - 1].post_id < r.post_id);
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("selectors resolve, unknown criteria do not") {
  CHECK(default_selectors().size() == 5);
  CHECK(find_selector("take-cover"));
  CHECK_FALSE(find_selector("nope"));
  CHECK_FALSE(selector_resolves({"bad", {"no-such-criterion"}}, CriterionRegistry::defaults()));
  CHECK_FALSE(selector_resolves({"empty", {}}, CriterionRegistry::defaults()));
  CHECK(CriterionRegistry::defaults().ids().size() == 8);
}

TEST_CASE("select_post takes the top positive rating and honours exclusions") {
  const std::vector<PostRating> r{{3, 0.9, {}}, {1, 0.5, {}}, {2, 0.0, {}}};
  CHECK(select_post(r) == 3);
  const int ex[] = {3};
  CHECK(select_post(r, ex) == 1);
  const int ex2[] = {3, 1};
  CHECK_FALSE(select_post(r, ex2));
}

TEST_CASE("path-not-near-player agrees with the uniform-cost oracle, with and without caches") {
  SplitMix64 rng(5);
  int cases = 0, mismatches = 0, ones = 0;
  while (cases < 120) {
    const Fixture f = random_fixture(rng, rng.uniform_int(6, 16), rng.uniform_int(6, 16), cases % 2 == 0);
    for (const auto& e : f.posts) {
      const double expect = oracle::path_not_near_player(f.map, cell_of(f.ctx.npc.position), e.post.cell,
                                                         f.ctx.player.position, f.ctx.config.exclusion_radius);
      if (criterion_static_pathfind_not_near_player(e, f.ctx) != expect) ++mismatches;
      ones += expect == 1.0;
    }
    ++cases;
  }
  CHECK(mismatches == 0);
  CHECK(ones > 0);
}

TEST_CASE("path criterion: a corridor through the player's disk scores 0, a detour of equal length 1") {
  const GridMap corridor = map_from_rows({"#######", "#.....#", "#######"});
  SelectionContext ctx = make_context(corridor, Pose({1.5, 1.5}, 0.0), Pose({3.5, 1.5}, 0.0), PostsConfig{});
  ctx.config.exclusion_radius = 1.0;
  EvaluatedPost post{{0, {5, 1}, {5.5, 1.5}, PostKind::Open, {}, CellKind::Free}, {}};
  CHECK(criterion_static_pathfind_not_near_player(post, ctx) == 0.0);

  const GridMap room(7, 5);
  SelectionContext open = make_context(room, Pose({0.5, 2.5}, 0.0), Pose({3.5, 0.5}, 0.0), PostsConfig{});
  open.config.exclusion_radius = 1.0;
  post.post.cell = {6, 2};
  post.post.position = {6.5, 2.5};
  CHECK(criterion_static_pathfind_not_near_player(post, open) == 1.0);
  prepare_paths(open);
  CHECK(criterion_static_pathfind_not_near_player(post, open) == 1.0);
}

TEST_CASE("serial and parallel post kernels agree") {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f = random_fixture(rng, 30, 30, true);
    f.ctx.config.max_cover = 200;
    f.ctx.config.max_open = 200;
    const auto posts = generate_posts(f.map, f.ctx);
    const auto a = kernels::validate_posts(f.map, posts, f.ctx);
    const auto b = kernels::serial::validate_posts(f.map, posts, f.ctx);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].post.id == b[i].post.id);
      CHECK(a[i].validation.valid == b[i].validation.valid);
      for (std::size_t r = 0; r < 4; ++r) CHECK(a[i].validation.rays[r].outcome == b[i].validation.rays[r].outcome);
    }
    for (const auto& sel : default_selectors()) {
      const auto ra = kernels::rate_posts(sel, a, f.ctx, CriterionRegistry::defaults());
      const auto rb = kernels::serial::rate_posts(sel, a, f.ctx, CriterionRegistry::defaults());
      REQUIRE(ra.size() == rb.size());
      for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].post_id == rb[i].post_id);
        CHECK(ra[i].rating == rb[i].rating);
      }
    }
  }
}
