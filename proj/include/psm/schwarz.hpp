#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "psm/harmonic2d.hpp"
#include "psm/layers.hpp"
#include "psm/pou.hpp"

namespace psm {

/// Dirichlet data g on the exterior boundary.
struct BoundaryData {
  enum class Kind { Zero, Constant, LinearX, LinearY, Custom };

  Kind kind = Kind::Zero;
  double value = 0.0;
  std::function<double(Vec2)> custom;

  static BoundaryData zero() { return {}; }
  static BoundaryData constant(double c) { return {Kind::Constant, c, {}}; }
  static BoundaryData linear_x() { return {Kind::LinearX, 0.0, {}}; }
  static BoundaryData linear_y() { return {Kind::LinearY, 0.0, {}}; }
  static BoundaryData from_function(std::function<double(Vec2)> f) {
    return {Kind::Custom, 0.0, std::move(f)};
  }
  /// Accepts `zero`, `const:C`, `linear-x`, `linear-y`.
  static BoundaryData parse(const std::string& text);

  double operator()(Vec2 p) const;
  ExteriorData as_exterior() const;
};

struct OperatorConfig {
  QuadratureConfig quad;
  std::size_t samples_per_arc = kDefaultSamplesPerArc;
  /// Worker cap for the per-subdomain map; 0 means all available cores.
  unsigned threads = 0;
  double exposure_eps = kDefaultExposureEps2d;
};

/// The block-sparse map e -> T e on skeleton fields. Row j reads only the
/// skeleton arcs of its neighbors that lie on circle j.
class IterationOperator {
 public:
  using PoUFactory = std::function<PoUSpec(const Geometry2D&)>;

  IterationOperator(Geometry2D geom, PoUKind kind, OperatorConfig config = {});
  IterationOperator(Geometry2D geom, const PoUFactory& make_pou, OperatorConfig config = {});

  const Discretization& discretization() const { return *disc_; }
  const Geometry2D& geometry() const { return disc_->geom; }
  const std::vector<Skeleton>& skeletons() const { return disc_->skeletons; }
  const PoUSpec& pou() const { return pou_; }
  const LayerAssignment& layers() const { return layers_; }
  const OperatorConfig& config() const { return config_; }

  SkeletonField constant(double c) const { return SkeletonField::constant(skeletons(), c); }

  /// One sweep of every subdomain solve. Exterior pieces carry `g`, zero when
  /// empty (error mode).
  SkeletonField apply(const SkeletonField& field, const ExteriorData& g = {}) const;

  /// Input blocks touched by row j.
  const std::vector<int>& columns(int j) const { return geometry().neighbors(j); }

 private:
  std::shared_ptr<const Discretization> disc_;
  PoUSpec pou_;
  OperatorConfig config_;
  LayerAssignment layers_;
};

SkeletonField apply_T(const IterationOperator& op, const SkeletonField& field);

inline constexpr double kDefaultContractionTol = 1e-6;
inline constexpr double kQuadratureTol = 1e-8;
inline constexpr double kUnderflowGuard = 1e-13;

struct RunReport {
  /// norms[n] is the sup norm after n applications; norms[0] is the start.
  std::vector<double> norms;
  /// Per-iteration, per-subdomain sup over all samples / interior samples.
  std::vector<std::vector<double>> max_all;
  std::vector<std::vector<double>> max_interior;
  /// Membership of iterate n in V_m and C_m with m = min(n, N_max).
  std::vector<bool> in_v;
  std::vector<bool> in_c;
  /// Smallest n with norms[n] < 1 - tol_contr, or -1.
  int first_contraction_index = -1;
  /// Solve mode: increments[n-1] = |u^n - u^{n-1}|_inf.
  std::vector<double> increments;
  double tol_contr = kDefaultContractionTol;
  bool underflow = false;

  int iterations() const { return static_cast<int>(norms.size()) - 1; }
};

/// Iterates e^{n+1} = T e^n from the all-ones field.
RunReport run_error_recursion(const IterationOperator& op, int n_iters,
                              double tol_contr = kDefaultContractionTol);

/// Fills per-iteration diagnostics of `field` as iterate number `n` into the report.
void record_iterate(const IterationOperator& op, const SkeletonField& field, RunReport& report);

/// Parallel Schwarz iteration with exterior data g. Stops when the increment
/// drops below stop_tol. Throws NoExteriorBoundary when no exterior piece exists.
std::pair<SkeletonField, RunReport> solve_psm(const IterationOperator& op, const BoundaryData& g,
                                              const SkeletonField& init, int n_iters,
                                              double stop_tol);

/// |T^n 1|_inf.
double operator_norm_estimate(const IterationOperator& op, int n);

/// exp of the least-squares slope of log norms over the last `window` steps.
/// Throws InsufficientIterations when fewer than window + 1 norms exceed the
/// underflow guard.
double asymptotic_factor(const std::vector<double>& norms, int window);
double asymptotic_factor(const RunReport& report, int window = 20);

/// Smooth random field with values in [lo, hi]: a low-order trigonometric
/// polynomial in the normalized arc parameter on every arc.
SkeletonField random_smooth_field(const std::vector<Skeleton>& skeletons, std::mt19937_64& rng,
                                  double lo = 0.0, double hi = 1.0);

struct MonotonicityReport {
  int trials = 0;
  /// max over samples of (T v - T u); positive values are violations.
  double max_violation = 0.0;
  /// max of |T v|_inf - |v|_inf over the drawn fields.
  double max_expansion = -1.0;
};

/// Draws random smooth pairs v <= u in [0, 1] and compares T v with T u.
MonotonicityReport monotonicity_check(const IterationOperator& op, int trials, std::uint64_t seed);

}  // namespace psm
