#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "psm/geometry2d.hpp"
#include "test_support.hpp"

using namespace psm;

namespace {

Geometry2D two_disks(double d = 1.5) { return build_geometry({{1, {0, 0}, 1.0}, {2, {d, 0}, 1.0}}); }

ErrorCode code_of(const std::vector<Disk>& disks) {
  try {
    build_geometry(disks);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

double mid_angle(const ArcPiece& p) { return p.interval.start + 0.5 * p.interval.width; }

}  // namespace

TEST_CASE("two overlapping disks are mutual neighbors") {
  const Geometry2D g = two_disks();
  CHECK(g.neighbors(1) == std::vector<int>{2});
  CHECK(g.neighbors(2) == std::vector<int>{1});
  CHECK(g.are_neighbors(1, 2));
}

TEST_CASE("invalid configurations are rejected with the right code") {
  CHECK(code_of({{1, {0, 0}, 1.0}, {2, {2, 0}, 1.0}}) == ErrorCode::TangentIntersection);
  CHECK(code_of({{1, {0, 0}, 1.0}, {2, {3, 0}, 1.0}}) == ErrorCode::NoIntersection);
  CHECK(code_of({{1, {0, 0}, 1.0}, {2, {1.5, 0}, 1.0}, {3, {10, 0}, 1.0}, {4, {11.5, 0}, 1.0}}) ==
        ErrorCode::Disconnected);
  CHECK(code_of({{1, {0, 0}, 1.0}}) == ErrorCode::InvalidInput);
  CHECK(code_of({{1, {0, 0}, -1.0}, {2, {1, 0}, 1.0}}) == ErrorCode::InvalidInput);
  CHECK(code_of({{1, {0, 0}, 1.0}, {3, {1, 0}, 1.0}}) == ErrorCode::InvalidInput);
  // A disk touching another from inside is also a tangency.
  CHECK(code_of({{1, {0, 0}, 2.0}, {2, {1, 0}, 1.0}}) == ErrorCode::TangentIntersection);
}

TEST_CASE("lens interval follows the law of cosines") {
  const Geometry2D g = two_disks(1.5);
  const auto iv = covered_interval(g.disk(1), g.disk(2));
  REQUIRE(iv);
  const double theta = std::acos(0.75);
  CHECK(theta == doctest::Approx(0.7227).epsilon(1e-4));
  CHECK(iv->width == doctest::Approx(2 * theta).epsilon(1e-14));
  CHECK(iv->contains(0.0));
  CHECK(iv->contains(theta - 1e-9));
  CHECK_FALSE(iv->contains(theta + 1e-9));

  const auto parts = partition_boundary(g, 1);
  REQUIRE(parts.size() == 2);
  const auto ext = std::find_if(parts.begin(), parts.end(), [](const ArcPiece& p) { return p.exterior(); });
  REQUIRE(ext != parts.end());
  CHECK(ext->interval.width == doctest::Approx(kTwoPi - 2 * theta).epsilon(1e-14));
}

TEST_CASE("flower: center disk has twelve alternating interior pieces") {
  const Geometry2D g = testing::flower();
  CHECK(g.neighbors(7) == std::vector<int>{1, 2, 3, 4, 5, 6});
  for (int j = 1; j <= 6; ++j) CHECK(g.neighbors(j).size() == 3);

  const auto parts = partition_boundary(g, 7);
  REQUIRE(parts.size() == 12);
  const std::size_t first = parts[0].multiplicity();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CHECK_FALSE(parts[i].exterior());
    CHECK(parts[i].multiplicity() == ((i % 2 == 0) ? first : 3 - first));
  }
}

TEST_CASE("partitions tile the circle and labels agree with pointwise membership") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Geometry2D g = testing::random_geometry(rng, 3 + trial % 12);
    for (const Disk& d : g.disks()) {
      const auto parts = partition_boundary(g, d.id);
      double total = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        total += parts[i].interval.width;
        if (parts.size() > 1) {
          const auto& next = parts[(i + 1) % parts.size()];
          const double gap = wrap_angle(parts[i].interval.end() - next.interval.start);
          CHECK(std::min(gap, kTwoPi - gap) < 1e-12);
        }
        for (double t : {0.1, 0.5, 0.9}) {
          const Vec2 x = polar(d.center, d.radius, parts[i].interval.start + t * parts[i].interval.width);
          for (int k : g.neighbors(d.id)) {
            CHECK(g.disk(k).contains(x) == parts[i].covered_by(k));
          }
        }
      }
      CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-10));
    }
  }
}

TEST_CASE("skeleton samples lie on the neighbor circle inside the owner") {
  const Geometry2D g = two_disks();
  const auto sk = build_skeletons(g, 33);
  const SkeletonArc& arc = sk[1].arcs.at(0);  // S_{2,1}
  CHECK(arc.neighbor == 1);
  REQUIRE(arc.samples.size() == 33);
  CHECK(arc.samples.front().on_owner_boundary);
  CHECK(arc.samples.back().on_owner_boundary);
  for (std::size_t s = 1; s + 1 < arc.samples.size(); ++s) {
    const auto& smp = arc.samples[s];
    CHECK_FALSE(smp.on_owner_boundary);
    CHECK(g.disk(2).contains(smp.point));
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Geometry2D rg = testing::random_geometry(rng, 8);
    for (const Skeleton& s : build_skeletons(rg, 17)) {
      for (const SkeletonArc& a : s.arcs) {
        const Disk& k = rg.disk(a.neighbor);
        for (const auto& smp : a.samples) {
          CHECK(std::abs(dist(smp.point, k.center) - k.radius) < 1e-12 * k.radius);
          CHECK(dist(smp.point, rg.disk(s.owner).center) <= rg.disk(s.owner).radius * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("flower: the center skeleton is six arcs with endpoints on its own circle") {
  const Geometry2D g = testing::flower();
  const auto sk = build_skeletons(g, 9);
  const Skeleton& s7 = sk[6];
  CHECK(s7.arcs.size() == 6);
  for (const SkeletonArc& a : s7.arcs) {
    for (const auto& smp : a.samples) {
      const double r = dist(smp.point, g.disk(7).center);
      CHECK(smp.on_owner_boundary == (std::abs(r - 1.0) < 1e-12));
    }
  }
}

TEST_CASE("interior pieces of circle k are exactly covered by the skeletons of their labels") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Geometry2D g = testing::random_geometry(rng, 10);
    const auto sk = build_skeletons(g, 5);
    for (const Disk& d : g.disks()) {
      for (const ArcPiece& p : partition_boundary(g, d.id)) {
        const double a = mid_angle(p);
        for (int j : g.neighbors(d.id)) {
          const int idx = sk[static_cast<std::size_t>(j - 1)].arc_index(d.id);
          const bool in_skeleton = idx >= 0 && sk[static_cast<std::size_t>(j - 1)]
                                                   .arcs[static_cast<std::size_t>(idx)]
                                                   .interval.contains(a);
          CHECK(in_skeleton == p.covered_by(j));
        }
      }
    }
  }
}

TEST_CASE("exact exposure matches special cases and a sampling oracle") {
  const Geometry2D g2 = two_disks();
  ActiveSet all(2, true);
  CHECK(exposure_fraction_2d(g2, 1, all) == doctest::Approx(1 - 2 * std::acos(0.75) / kTwoPi));
  CHECK(exposure_fraction_2d(g2, 1, ActiveSet{true, false}) == 1.0);

  const Geometry2D f = testing::flower();
  CHECK(exposure_fraction_2d(f, 7, ActiveSet(7, true)) == 0.0);

  std::mt19937_64 rng(31);
  std::mt19937_64 mc(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Geometry2D g = testing::random_geometry(rng, 4 + trial % 20);
    ActiveSet active(g.size(), true);
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = (rng() % 4) != 0;
    const int j = 1 + static_cast<int>(rng() % g.size());
    CHECK(std::abs(exposure_fraction_2d(g, j, active) - testing::monte_carlo_exposure(g, j, active, mc)) <
          2e-3);
  }
}

TEST_CASE("union measure merges overlapping and wrapping intervals") {
  CHECK(union_measure({}) == 0.0);
  CHECK(union_measure({{0.0, 1.0}, {0.5, 1.0}}) == doctest::Approx(1.5));
  // [6, 7) wraps past zero and swallows [0, 0.5).
  CHECK(union_measure({{6.0, 1.0}, {0.0, 0.5}}) == doctest::Approx(1.0));
  CHECK(union_measure({{1.0, kTwoPi}}) == doctest::Approx(kTwoPi));
}

TEST_CASE("disk files round-trip exactly") {
  const std::vector<Disk> disks{{1, {0.1, 1.0 / 3.0}, std::numbers::pi}, {2, {1e-17, -2.5}, 0.7}};
  std::stringstream ss;
  write_disks(ss, disks);
  const auto back = read_disks(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].id == disks[i].id);
    CHECK(back[i].center == disks[i].center);
    CHECK(back[i].radius == disks[i].radius);
  }
  std::istringstream bad("# disks2d v1\n1 0 0\n");
  CHECK_THROWS_AS(read_disks(bad), Error);
}
