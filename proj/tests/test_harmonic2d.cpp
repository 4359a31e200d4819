#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "psm/harmonic2d.hpp"
#include "psm/pou.hpp"
#include "test_support.hpp"

using namespace psm;

namespace {

/// Points of the disk at distance >= margin * r from its circle.
std::vector<Vec2> interior_grid(const Disk& d, double margin, int rings = 12, int spokes = 37) {
  std::vector<Vec2> pts{d.center};
  for (int i = 1; i <= rings; ++i) {
    const double rho = d.radius * (1.0 - margin) * i / rings;
    for (int s = 0; s < spokes; ++s) pts.push_back(polar(d.center, rho, kTwoPi * (s + 0.5 * i) / spokes));
  }
  return pts;
}

double harmonic_poly(const Disk& d, int m, bool imag, Vec2 x) {
  const std::complex<double> z((x.x - d.center.x) / d.radius, (x.y - d.center.y) / d.radius);
  const std::complex<double> p = std::pow(z, m);
  return imag ? p.imag() : p.real();
}

}  // namespace

TEST_CASE("harmonic polynomials are reproduced to 1e-8 away from the circle") {
  const Disk d{1, {0.3, -1.7}, 2.5};
  const auto pts = interior_grid(d, 0.1);
  for (int m = 0; m <= 8; ++m) {
    for (bool imag : {false, true}) {
      const auto trace = BoundaryTrace::from_function(
          1, [m, imag](double t) { return imag ? std::sin(m * t) : std::cos(m * t); });
      const PoissonEvaluator eval(d, trace, {});
      double err = 0.0;
      for (Vec2 x : pts) err = std::max(err, std::abs(eval(x) - harmonic_poly(d, m, imag, x)));
      CAPTURE(m);
      CAPTURE(imag);
      CHECK(err <= 1e-8);
    }
  }
}

TEST_CASE("constants and low modes on the unit disk") {
  const Disk unit{1, {0, 0}, 1.0};
  const QuadratureConfig quad;
  const auto one = BoundaryTrace::from_function(1, [](double) { return 1.0; });
  const auto cos1 = BoundaryTrace::from_function(1, [](double t) { return std::cos(t); });
  const auto cos8 = BoundaryTrace::from_function(1, [](double t) { return std::cos(8 * t); });
  for (Vec2 x : interior_grid(unit, 0.1)) {
    CHECK(std::abs(poisson_eval(unit, one, x, quad) - 1.0) <= 1e-12);
    CHECK(std::abs(poisson_eval(unit, cos1, x, quad) - x.x) <= 1e-10);
    const double rho = norm(x);
    CHECK(std::abs(poisson_eval(unit, cos8, x, quad) - std::pow(rho, 8) * std::cos(8 * std::atan2(x.y, x.x))) <=
          1e-8);
  }
  // Very close to the circle the evaluator stays accurate.
  const PoissonEvaluator eval(unit, cos1, quad);
  for (double gap : {1e-3, 1e-6, 1e-9}) {
    const Vec2 x = polar({0, 0}, 1.0 - gap, 0.7);
    CHECK(std::abs(eval(x) - x.x) <= 1e-9);
  }
}

TEST_CASE("points too close to the circle are refused by the checked entry point") {
  const Disk unit{1, {0, 0}, 1.0};
  const auto one = BoundaryTrace::from_function(1, [](double) { return 1.0; });
  CHECK_THROWS_AS(poisson_eval(unit, one, {1.0 - 1e-5, 0.0}), Error);
  CHECK_THROWS_AS(PoissonEvaluator(unit, one, {})({1.0, 0.0}), Error);
}

TEST_CASE("extension is linear and obeys the maximum principle on piecewise data") {
  const Geometry2D g = testing::flower();
  const auto parts = partition_boundary(g, 3);
  const Disk& d = g.disk(3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const QuadratureConfig quad;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(parts.size()), b(parts.size());
    for (auto& v : a) v = coef(rng);
    for (auto& v : b) v = coef(rng);
    BoundaryTrace t1{3, {}}, t2{3, {}}, mix{3, {}};
    const double alpha = coef(rng), beta = coef(rng);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto f1 = [ai = a[i]](double t) { return ai * std::cos(3 * t) + 0.5 * ai; };
      auto f2 = [bi = b[i]](double t) { return bi * std::sin(t); };
      t1.pieces.push_back({parts[i].interval, parts[i].label, f1});
      t2.pieces.push_back({parts[i].interval, parts[i].label, f2});
      mix.pieces.push_back(
          {parts[i].interval, parts[i].label, [=](double t) { return alpha * f1(t) + beta * f2(t); }});
    }
    const PoissonEvaluator e1(d, t1, quad), e2(d, t2, quad), em(d, mix, quad);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      lo = std::min(lo, -1.5 * std::abs(a[i]));
      hi = std::max(hi, 1.5 * std::abs(a[i]));
    }
    for (Vec2 x : interior_grid(d, 0.01, 8, 23)) {
      CHECK(std::abs(em(x) - alpha * e1(x) - beta * e2(x)) <= 1e-10);
      const double v = e1(x);
      CHECK(v >= lo - 1e-8);
      CHECK(v <= hi + 1e-8);
    }
  }
}

TEST_CASE("interior traces built from skeleton data") {
  const Discretization disc = discretize(testing::three_disks(), 65);
  const PoUSpec pou = continuous_pou(disc.geom);

  SUBCASE("all-ones field gives one on interior pieces and zero on exterior pieces") {
    const auto field = SkeletonField::constant(disc.skeletons, 1.0);
    const BoundaryTrace t = assemble_interior_trace(disc, 1, field, pou);
    for (const TracePiece& p : t.pieces) {
      for (double s : {0.01, 0.5, 0.99}) {
        const double v = p.value(p.interval.start + s * p.interval.width);
        CHECK(v == doctest::Approx(p.label.empty() ? 0.0 : 1.0).epsilon(1e-14));
      }
    }
  }

  SUBCASE("halving the data of subdomain 2 on circle 1 halves the trace where only 2 covers") {
    auto field = SkeletonField::constant(disc.skeletons, 1.0);
    const int a = disc.skeleton(2).arc_index(1);
    REQUIRE(a >= 0);
    for (double& v : field.values[1][static_cast<std::size_t>(a)]) v = 0.5;
    const BoundaryTrace t = assemble_interior_trace(disc, 1, field, pou);
    bool seen = false;
    for (const TracePiece& p : t.pieces) {
      if (p.label != std::vector<int>{2}) continue;
      seen = true;
      for (double s : {0.01, 0.5, 0.99})
        CHECK(p.value(p.interval.start + s * p.interval.width) == doctest::Approx(0.5).epsilon(1e-14));
    }
    CHECK(seen);
  }

  SUBCASE("missing neighbor data is reported") {
    auto field = SkeletonField::constant(disc.skeletons, 1.0);
    field.values[1].clear();
    CHECK_THROWS_AS(assemble_interior_trace(disc, 1, field, pou), Error);
  }
}

TEST_CASE("unit data on the interior boundary gives values below one on the lens skeleton") {
  const Discretization disc = discretize(build_geometry({{1, {0, 0}, 1.0}, {2, {1.5, 0}, 1.0}}), 33);
  const PoUSpec pou = continuous_pou(disc.geom);
  const auto field = SkeletonField::constant(disc.skeletons, 1.0);
  const BoundaryTrace t = assemble_interior_trace(disc, 2, field, pou);
  const PoissonEvaluator eval(disc.geom.disk(2), t, {});
  const SkeletonArc& arc = disc.skeleton(2).arcs.at(0);
  for (std::size_t s = 0; s < arc.samples.size(); ++s) {
    const double v = eval_at_skeleton_sample(eval, disc.geom.disk(1), arc, s);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }

  const auto zero = BoundaryTrace::from_function(2, [](double) { return 0.0; });
  const PoissonEvaluator ez(disc.geom.disk(2), zero, {});
  CHECK(ez(arc.samples[16].point) == 0.0);
}

TEST_CASE("quadrature settings are validated") {
  QuadratureConfig q;
  q.nodes_per_piece = 2;
  CHECK_THROWS_AS(q.validate(), Error);
  q = {};
  q.min_distance = 0.0;
  CHECK_THROWS_AS(q.validate(), Error);
  CHECK_NOTHROW(QuadratureConfig{}.validate());
}
