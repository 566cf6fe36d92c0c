// Serial reference vs OpenMP kernels on a cluttered 48x48 map. Every timed
// pair is also checked for identical output; a mismatch exits nonzero.
//
//   bench_kernels            full run
//   bench_kernels --quick    a few repetitions (used as a ctest smoke test)

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>

#include "stealth/kernels.hpp"
#include "stealth/perception.hpp"
#include "stealth/rng.hpp"

using namespace stealth;

namespace {

GridMap cluttered_map(int w, int h, std::uint64_t seed) {
  GridMap map(w, h);
  SplitMix64 rng(seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        map.set({x, y}, CellKind::Wall);
        continue;
      }
      const double u = rng.uniform();
      if (u < 0.06) map.set({x, y}, CellKind::Wall);
      else if (u < 0.14) map.set({x, y}, CellKind::LowCover);
    }
  return map;
}

Point free_point(const GridMap& map, SplitMix64& rng) {
  for (;;) {
    const Cell c{rng.uniform_int(1, map.width() - 2), rng.uniform_int(1, map.height() - 2)};
    if (map.at(c) == CellKind::Free) return cell_center(c);
  }
}

double time_ms(int reps, const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool same(const std::vector<EvaluatedPost>& a, const std::vector<EvaluatedPost>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].post.id != b[i].post.id || a[i].validation.valid != b[i].validation.valid) return false;
    for (std::size_t r = 0; r < a[i].validation.rays.size(); ++r)
      if (a[i].validation.rays[r].outcome != b[i].validation.rays[r].outcome) return false;
  }
  return true;
}

bool same(const std::vector<PostRating>& a, const std::vector<PostRating>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].post_id != b[i].post_id || a[i].rating != b[i].rating || a[i].values != b[i].values) return false;
  return true;
}

int failures = 0;

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-18s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  %s\n", name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, equal ? "identical" : "MISMATCH");
  if (!equal) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 2 : 30;
  std::printf("threads %d, repetitions %d\n", kernels::thread_count(), reps);

  const GridMap map = cluttered_map(48, 48, 7);
  SplitMix64 rng(11);
  const Pose npc(free_point(map, rng), 0.3);
  const Pose player(free_point(map, rng), 2.1);

  // Post validation and rating: many posts so the batch is worth splitting.
  PostsConfig cfg;
  cfg.max_cover = 400;
  cfg.max_open = 400;
  cfg.cover_radius = 40.0;
  SelectionContext ctx = make_context(map, npc, player, cfg);
  prepare_paths(ctx);
  const auto posts = generate_posts(map, ctx);
  std::printf("posts %zu\n", posts.size());
  std::vector<EvaluatedPost> ev_s, ev_p;
  const double vs = time_ms(reps, [&] { ev_s = kernels::serial::validate_posts(map, posts, ctx); });
  const double vp = time_ms(reps, [&] { ev_p = kernels::validate_posts(map, posts, ctx); });
  report("validate_posts", vs, vp, same(ev_s, ev_p));

  const auto& registry = CriterionRegistry::defaults();
  const PostSelector& selector = *find_selector("take-cover");
  std::vector<PostRating> r_s, r_p;
  const double rs = time_ms(reps, [&] { r_s = kernels::serial::rate_posts(selector, ev_s, ctx, registry); });
  const double rp = time_ms(reps, [&] { r_p = kernels::rate_posts(selector, ev_s, ctx, registry); });
  report("rate_posts", rs, rp, same(r_s, r_p));

  // Observer audit over every free cell, as the teleport rule does.
  std::vector<Observer> observers;
  for (int i = 0; i < 8; ++i)
    observers.push_back({Pose(free_point(map, rng), rng.uniform() * kTwoPi), InverseDistanceCone{}});
  std::vector<Point> points;
  for (std::size_t i = 0; i < map.cell_count(); ++i)
    if (map.cells()[i] == CellKind::Free) points.push_back(cell_center(map.cell_at_index(i)));
  std::vector<std::uint8_t> m_s, m_p;
  const double os = time_ms(reps, [&] { m_s = kernels::serial::observed_mask(map, observers, points); });
  const double op = time_ms(reps, [&] { m_p = kernels::observed_mask(map, observers, points); });
  report("observed_mask", os, op, m_s == m_p);

  // Canvass primitive scoring at the largest default radius.
  const CanvassGrid grid(map, npc, 14.0);
  const auto prims = default_primitives();
  std::vector<int> p_s, p_p;
  const int creps = reps * 20;
  const double cs = time_ms(creps, [&] { p_s = kernels::serial::score_primitives(grid, map, npc, prims); });
  const double cp = time_ms(creps, [&] { p_p = kernels::score_primitives(grid, map, npc, prims); });
  report("score_primitives", cs, cp, p_s == p_p);

  return failures == 0 ? 0 : 1;
}
