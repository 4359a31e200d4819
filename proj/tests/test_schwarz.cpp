#include <cmath>
#include <random>

#include "doctest.h"
#include "psm/generators.hpp"
#include "psm/schwarz.hpp"
#include "test_support.hpp"

using namespace psm;

namespace {

OperatorConfig coarse() {
  OperatorConfig c;
  c.samples_per_arc = 65;
  return c;
}

}  // namespace

TEST_CASE("operator rows read only neighbor blocks") {
  const IterationOperator op(testing::flower(), PoUKind::Continuous, coarse());
  CHECK(op.columns(7) == std::vector<int>{1, 2, 3, 4, 5, 6});
  // Perturbing a non-neighbor block leaves row 1 untouched.
  auto base = op.constant(1.0);
  auto bumped = base;
  for (auto& arc : bumped.values[3]) // subdomain 4 is not a neighbor of 1
    for (double& v : arc) v = 0.25;
  REQUIRE_FALSE(op.geometry().are_neighbors(1, 4));
  const auto a = op.apply(base);
  const auto b = op.apply(bumped);
  CHECK(a.values[0] == b.values[0]);
}

TEST_CASE("zero maps to zero and one stays within [0, 1]") {
  const IterationOperator op(testing::flower(), PoUKind::Continuous, coarse());
  CHECK(apply_T(op, op.constant(0.0)).norm_inf() == 0.0);
  const auto t1 = apply_T(op, op.constant(1.0));
  for (const auto& blk : t1.values)
    for (const auto& arc : blk)
      for (double v : arc) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + kQuadratureTol);
      }
  // The center disk sees only interior data that sums to one.
  for (const auto& arc : t1.values[6])
    for (double v : arc) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-disk lens contracts on interior samples after one step") {
  const IterationOperator op(build_geometry({{1, {0, 0}, 1.0}, {2, {1.5, 0}, 1.0}}),
                             PoUKind::Continuous, coarse());
  const auto t1 = apply_T(op, op.constant(1.0));
  for (int j : {1, 2}) CHECK(t1.max_interior(j, op.skeletons()[static_cast<std::size_t>(j - 1)]) < 1.0);
}

TEST_CASE("first contraction follows the layer count") {
  SUBCASE("two hex layers") {
    const IterationOperator op(hex_layers(2), PoUKind::Continuous, coarse());
    CHECK(op.layers().n_max == 2);
    const RunReport rep = run_error_recursion(op, 4);
    CHECK(rep.first_contraction_index == 3);
    for (int n = 0; n <= 2; ++n) CHECK(rep.norms[static_cast<std::size_t>(n)] >= 1.0 - 1e-6);
  }
  SUBCASE("chain of five contracts every step") {
    const IterationOperator op(chain(5), PoUKind::Continuous, coarse());
    const RunReport rep = run_error_recursion(op, 6);
    CHECK(rep.first_contraction_index == 1);
    for (int n = 1; n <= 6; ++n)
      CHECK(rep.norms[static_cast<std::size_t>(n)] < rep.norms[static_cast<std::size_t>(n - 1)]);
    CHECK(operator_norm_estimate(op, 1) < 1.0);
  }
}

TEST_CASE("norms never grow and the all-ones start dominates random starts") {
  const IterationOperator op(hex_layers(2), PoUKind::Continuous, coarse());
  const RunReport rep = run_error_recursion(op, 6);
  for (std::size_t n = 1; n < rep.norms.size(); ++n) CHECK(rep.norms[n] <= rep.norms[n - 1] + kQuadratureTol);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    SkeletonField v = random_smooth_field(op.skeletons(), rng, -1.0, 1.0);
    const double scale = v.norm_inf();
    for (auto& blk : v.values)
      for (auto& arc : blk)
        for (double& x : arc) x /= scale;
    for (int n = 1; n <= 3; ++n) {
      v = apply_T(op, v);
      CHECK(rep.norms[static_cast<std::size_t>(n)] >= v.norm_inf() - 1e-8);
    }
  }
}

TEST_CASE("monotone and non-expansive on random pairs") {
  const IterationOperator op(hex_layers(2), PoUKind::Continuous, coarse());
  const MonotonicityReport rep = monotonicity_check(op, 5, 1234);
  CHECK(rep.trials == 5);
  CHECK(rep.max_violation <= 1e-8);
  CHECK(rep.max_expansion <= 1e-8);

  std::mt19937_64 rng(5);
  const auto u = random_smooth_field(op.skeletons(), rng);
  CHECK((apply_T(op, u) - apply_T(op, u)).norm_inf() == 0.0);
}

TEST_CASE("random smooth fields respect the requested range") {
  const auto sk = build_skeletons(testing::flower(), 17);
  std::mt19937_64 rng(1);
  const auto f = random_smooth_field(sk, rng, 0.25, 0.75);
  for (const auto& blk : f.values)
    for (const auto& arc : blk)
      for (double v : arc) {
        CHECK(v >= 0.25);
        CHECK(v <= 0.75);
      }
}

TEST_CASE("solving with zero data reproduces the error recursion") {
  const IterationOperator op(hex_layers(2), PoUKind::Continuous, coarse());
  const RunReport err = run_error_recursion(op, 5);
  const auto [u, rep] = solve_psm(op, BoundaryData::zero(), op.constant(1.0), 5, 0.0);
  REQUIRE(rep.norms.size() == err.norms.size());
  for (std::size_t n = 0; n < err.norms.size(); ++n) CHECK(rep.norms[n] == err.norms[n]);
}

TEST_CASE("solving reproduces globally harmonic data") {
  const IterationOperator op(hex_layers(2), PoUKind::Continuous, coarse());
  SUBCASE("constant") {
    const auto [u, rep] = solve_psm(op, BoundaryData::constant(1.0), op.constant(0.0), 200, 1e-12);
    CHECK((u - op.constant(1.0)).norm_inf() < 1e-8);
  }
  SUBCASE("linear in y") {
    const auto [u, rep] = solve_psm(op, BoundaryData::linear_y(), op.constant(0.0), 400, 1e-12);
    const auto exact = SkeletonField::from_function(op.skeletons(),
                                                    [](int, const SkeletonSample& s) { return s.point.y; });
    // Coarse sampling: the interpolation error is larger than at the default density.
    CHECK((u - exact).norm_inf() < 1e-4);
  }
}

TEST_CASE("a bounded union always has exterior pieces to carry data") {
  const IterationOperator op(testing::flower(), PoUKind::Continuous, coarse());
  CHECK(op.discretization().has_exterior());
  CHECK_NOTHROW(solve_psm(op, BoundaryData::zero(), op.constant(0.0), 1, 0.0));
}

TEST_CASE("asymptotic factor of an exact geometric sequence") {
  std::vector<double> norms;
  for (int n = 0; n <= 40; ++n) norms.push_back(3.0 * std::pow(0.8, n));
  CHECK(asymptotic_factor(norms, 20) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(asymptotic_factor(std::vector<double>{1.0, 0.5}, 20), Error);
  std::vector<double> tiny(30, 1e-20);
  CHECK_THROWS_AS(asymptotic_factor(tiny, 20), Error);
}

TEST_CASE("boundary data strings parse") {
  CHECK(BoundaryData::parse("zero")({3, 4}) == 0.0);
  CHECK(BoundaryData::parse("const:2.5")({3, 4}) == 2.5);
  CHECK(BoundaryData::parse("linear-x")({3, 4}) == 3.0);
  CHECK(BoundaryData::parse("linear-y")({3, 4}) == 4.0);
  CHECK_THROWS_AS(BoundaryData::parse("quadratic"), Error);
  CHECK_THROWS_AS(BoundaryData::parse("const:abc"), Error);
}
