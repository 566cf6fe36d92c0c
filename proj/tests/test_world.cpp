#include <doctest.h>

#include "oracles.hpp"
#include "stealth/world.hpp"

using namespace stealth;

namespace {

GridMap rows(std::vector<std::string> r) { return map_from_rows(r); }

Point random_point(SplitMix64& rng, const GridMap& map, bool lattice) {
  if (lattice) {
    // cell centers and corners make rays pass exactly through grid corners
    const double step = rng.uniform() < 0.5 ? 0.5 : 1.0;
    const int nx = static_cast<int>(map.width() / step), ny = static_cast<int>(map.height() / step);
    return {rng.uniform_int(0, nx - 1) * step + (step == 1.0 ? 0.5 : 0.0),
            rng.uniform_int(0, ny - 1) * step + (step == 1.0 ? 0.5 : 0.0)};
  }
  return {rng.uniform() * map.width(), rng.uniform() * map.height()};
}

}  // namespace

TEST_CASE("map rows: top row is the northern edge, out of bounds reads as wall") {
  const GridMap m = rows({"#~.", "..."});
  CHECK(m.width() == 3);
  CHECK(m.height() == 2);
  CHECK(m.at({0, 1}) == CellKind::Wall);
  CHECK(m.at({1, 1}) == CellKind::LowCover);
  CHECK(m.at({0, 0}) == CellKind::Free);
  CHECK(m.at({-1, 0}) == CellKind::Wall);
  CHECK(m.at({3, 0}) == CellKind::Wall);
  CHECK_THROWS(rows({"#x"}));
  CHECK_THROWS(rows({"##", "#"}));
}

TEST_CASE("raycast: walls block both heights, low cover only crouch") {
  const GridMap m = rows({".....", "..~..", "....."});
  CHECK(line_clear(m, {0.5, 1.5}, {4.5, 1.5}, RayHeight::Stand));
  CHECK_FALSE(line_clear(m, {0.5, 1.5}, {4.5, 1.5}, RayHeight::Crouch));
  const GridMap w = rows({".....", "..#..", "....."});
  const RayHit hit = raycast(w, {0.5, 1.5}, {4.5, 1.5}, RayHeight::Stand);
  REQUIRE(hit.blocked());
  CHECK(*hit.hit_cell == Cell{2, 1});
  CHECK(hit.hit_point->x == doctest::Approx(2.0));
}

TEST_CASE("raycast: exact corner pass blocked if either side cell blocks") {
  // diagonal from (0.5,0.5) to (2.5,2.5) passes the corner (1,1) and (2,2)
  const GridMap one_side = rows({"...", "...", ".#."});
  CHECK_FALSE(line_clear(one_side, {0.5, 0.5}, {2.5, 2.5}, RayHeight::Stand));
  CHECK_FALSE(line_clear(one_side, {2.5, 2.5}, {0.5, 0.5}, RayHeight::Stand));
  const GridMap open = rows({"...", "...", "..."});
  CHECK(line_clear(open, {0.5, 0.5}, {2.5, 2.5}, RayHeight::Stand));
}

TEST_CASE("raycast: the target cell counts, leaving the map blocks") {
  const GridMap m = rows({"..#"});
  CHECK_FALSE(line_clear(m, {0.5, 0.5}, {2.5, 0.5}, RayHeight::Stand));
  CHECK_FALSE(line_clear(m, {0.5, 0.5}, {-1.0, 0.5}, RayHeight::Stand));
  CHECK(line_clear(m, {0.5, 0.5}, {0.5, 0.5}, RayHeight::Stand));
}

TEST_CASE("raycast agrees with the grid-line intersection oracle") {
  SplitMix64 rng(101);
  int disagreements = 0, blocked = 0, total = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const GridMap m = oracle::random_map(rng, rng.uniform_int(4, 14), rng.uniform_int(4, 14), 0.15, 0.15);
    for (int r = 0; r < 200; ++r) {
      const bool lattice = rng.uniform() < 0.5;
      const Point a = random_point(rng, m, lattice), b = random_point(rng, m, lattice);
      for (RayHeight h : {RayHeight::Stand, RayHeight::Crouch}) {
        const bool expect = oracle::ray_blocked(m, a, b, h);
        const bool got = raycast(m, a, b, h).blocked();
        if (expect != got) ++disagreements;
        blocked += got;
        ++total;
      }
    }
  }
  CHECK(disagreements == 0);
  CHECK(blocked > total / 10);  // the sample is not trivially clear
  CHECK(blocked < total);
}

TEST_CASE("raycast is symmetric under reversal") {
  SplitMix64 rng(7);
  const GridMap m = oracle::random_map(rng, 12, 12, 0.2, 0.1);
  for (int i = 0; i < 2000; ++i) {
    const Point a = random_point(rng, m, i % 2 == 0), b = random_point(rng, m, i % 2 == 0);
    CHECK(line_clear(m, a, b, RayHeight::Crouch) == line_clear(m, b, a, RayHeight::Crouch));
  }
}

TEST_CASE("find_path: corner cutting past walls is forbidden") {
  const GridMap m = rows({"..", "#."});
  // (0,1) to (1,0): the diagonal would squeeze past the wall at (0,0)
  const PathResult p = find_path(m, {0.5, 1.5}, {1.5, 0.5});
  REQUIRE(p.found());
  CHECK(p.length == doctest::Approx(2.0));
  CHECK(p.waypoints.size() == 3);
  CHECK(p.waypoints.front() == Point{0.5, 1.5});
  CHECK(p.waypoints.back() == Point{1.5, 0.5});
}

TEST_CASE("find_path: walls and masks") {
  const GridMap m = rows({".#.", ".#.", ".#."});
  CHECK_FALSE(find_path(m, {0.5, 0.5}, {2.5, 0.5}).found());
  CHECK_FALSE(find_path(m, {0.5, 0.5}, {1.5, 0.5}).found());  // goal is a wall
  const GridMap open = rows({"...", "...", "..."});
  CellMask mask(open.cell_count(), 0);
  mask[open.index({1, 1})] = 1;
  const PathResult around = find_path(open, {0.5, 1.5}, {2.5, 1.5}, mask);
  REQUIRE(around.found());
  CHECK(around.length == doctest::Approx(2.0 * std::sqrt(2.0)));
  mask[open.index({2, 1})] = 1;
  CHECK_FALSE(find_path(open, {0.5, 1.5}, {2.5, 1.5}, mask).found());  // masked goal
}

TEST_CASE("find_path and DistanceField lengths match the uniform-cost oracle") {
  SplitMix64 rng(33);
  int checked = 0, mismatches = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const GridMap m = oracle::random_map(rng, rng.uniform_int(4, 16), rng.uniform_int(4, 16), 0.25, 0.1);
    const auto free = oracle::cells_of_kind(m, CellKind::Free);
    if (free.size() < 2) continue;
    const Cell src = free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
    CellMask mask;
    if (trial % 2 == 1) mask = oracle::disk_mask(m, cell_center(free[0]), 1.6);
    const auto truth = oracle::ucs(m, src, mask);
    const DistanceField field(m, src, mask);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) {
        const double expect = truth[m.index({x, y})];
        if (std::isfinite(expect) != field.reachable({x, y}) ||
            (std::isfinite(expect) && std::fabs(expect - field.at({x, y})) > 1e-9))
          ++mismatches;
        const PathResult p = find_path(m, cell_center(src), cell_center({x, y}), mask);
        if (p.found() != std::isfinite(expect) || (p.found() && std::fabs(p.length - expect) > 1e-9)) ++mismatches;
        ++checked;
      }
  }
  CHECK(checked > 5000);
  CHECK(mismatches == 0);
}

TEST_CASE("path waypoints are legal steps whose costs sum to the length") {
  SplitMix64 rng(5);
  const GridMap m = oracle::random_map(rng, 16, 16, 0.25, 0.1);
  const auto free = oracle::cells_of_kind(m, CellKind::Free);
  for (int i = 0; i < 200; ++i) {
    const Cell a = free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
    const Cell b = free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
    const PathResult p = find_path(m, cell_center(a), cell_center(b));
    if (!p.found()) continue;
    double sum = 0.0;
    for (std::size_t k = 1; k < p.waypoints.size(); ++k) {
      const Cell u = cell_of(p.waypoints[k - 1]), v = cell_of(p.waypoints[k]);
      const int dx = v.x - u.x, dy = v.y - u.y;
      REQUIRE(std::max(std::abs(dx), std::abs(dy)) == 1);
      CHECK(m.passable(v));
      if (dx != 0 && dy != 0) {
        CHECK(m.passable({u.x + dx, u.y}));
        CHECK(m.passable({u.x, u.y + dy}));
      }
      sum += (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
    }
    CHECK(sum == doctest::Approx(p.length));
  }
}

TEST_CASE("multi-source distance field is the minimum over sources") {
  SplitMix64 rng(71);
  const GridMap m = oracle::random_map(rng, 14, 12, 0.2, 0.1);
  const auto free = oracle::cells_of_kind(m, CellKind::Free);
  const std::vector<Cell> sources{free[0], free[free.size() / 2], free.back()};
  const DistanceField multi(m, sources);
  std::vector<std::vector<double>> single;
  for (Cell s : sources) single.push_back(oracle::ucs(m, s));
  for (std::size_t i = 0; i < m.cell_count(); ++i) {
    const double expect = std::min({single[0][i], single[1][i], single[2][i]});
    const Cell c = m.cell_at_index(i);
    if (std::isfinite(expect)) CHECK(multi.at(c) == doctest::Approx(expect));
    else CHECK_FALSE(multi.reachable(c));
  }
}

TEST_CASE("cells_in_wedge matches the full-scan oracle") {
  SplitMix64 rng(19);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const GridMap m = oracle::random_map(rng, rng.uniform_int(5, 14), rng.uniform_int(5, 14), 0.15, 0.15);
    const Pose apex({1.0 + rng.uniform() * (m.width() - 2), 1.0 + rng.uniform() * (m.height() - 2)},
                    trial % 4 == 0 ? kPi / 4.0 * rng.uniform_int(0, 7) : rng.uniform() * kTwoPi);
    const double half = (trial % 3 == 0) ? kPi / 4.0 : rng.uniform() * kPi;
    const double radius = rng.uniform() * 5.0;
    if (cells_in_wedge(m, apex, half, radius) != oracle::wedge(m, apex, half, radius)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("cells_in_wedge: 9x9 room, 45 degree wedge of radius 2 facing east") {
  const GridMap m(9, 9);
  const Pose apex({4.5, 4.5}, 0.0);
  const auto cells = cells_in_wedge(m, apex, kPi / 4.0, 2.0);
  // own cell, two ahead, and the diagonal neighbours at exactly 45 degrees
  CHECK(cells == std::vector<Cell>{{5, 3}, {4, 4}, {5, 4}, {6, 4}, {5, 5}});
  CHECK(cells_in_wedge(m, apex, kPi / 4.0, 0.0).empty());
}
