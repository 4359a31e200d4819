#include "psm/schwarz.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace psm {

BoundaryData BoundaryData::parse(const std::string& text) {
  if (text == "zero") return zero();
  if (text == "linear-x") return linear_x();
  if (text == "linear-y") return linear_y();
  if (text.rfind("const:", 0) == 0) {
    const std::string num = text.substr(6);
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !std::isfinite(c)) {
      throw Error(ErrorCode::InvalidInput, "bad constant in '" + text + "'");
    }
    return constant(c);
  }
  throw Error(ErrorCode::InvalidInput,
              "boundary data must be zero, const:C, linear-x or linear-y, got '" + text + "'");
}

double BoundaryData::operator()(Vec2 p) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return value;
    case Kind::LinearX: return p.x;
    case Kind::LinearY: return p.y;
    case Kind::Custom: return custom ? custom(p) : 0.0;
  }
  return 0.0;
}

ExteriorData BoundaryData::as_exterior() const {
  if (kind == Kind::Zero) return {};
  return [self = *this](Vec2 p) { return self(p); };
}

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

IterationOperator::IterationOperator(Geometry2D geom, PoUKind kind, OperatorConfig config)
    : IterationOperator(
          std::move(geom),
          [kind](const Geometry2D& g) { return PoUSpec(g, kind); }, config) {}

IterationOperator::IterationOperator(Geometry2D geom, const PoUFactory& make_pou,
                                     OperatorConfig config)
    : disc_(std::make_shared<const Discretization>(discretize(std::move(geom), config.samples_per_arc))),
      pou_(make_pou(disc_->geom)),
      config_(config),
      layers_(peel_layers_2d(disc_->geom, config.exposure_eps)) {
  config_.quad.validate();
}

SkeletonField IterationOperator::apply(const SkeletonField& field, const ExteriorData& g) const {
  const Discretization& d = *disc_;
  if (field.values.size() != d.skeletons.size()) {
    throw Error(ErrorCode::MissingSkeletonData, "field does not match the skeletons");
  }
  SkeletonField out;
  out.values.resize(d.skeletons.size());
  parallel_for(d.skeletons.size(), config_.threads, [&](std::size_t i) {
    const int j = static_cast<int>(i) + 1;
    const Skeleton& sk = d.skeletons[i];
    const BoundaryTrace trace = assemble_interior_trace(d, j, field, pou_, g);
    const PoissonEvaluator eval(d.geom.disk(j), trace, config_.quad);
    auto& block = out.values[i];
    block.resize(sk.arcs.size());
    for (std::size_t a = 0; a < sk.arcs.size(); ++a) {
      const SkeletonArc& arc = sk.arcs[a];
      const Disk& neighbor = d.geom.disk(arc.neighbor);
      block[a].resize(arc.samples.size());
      for (std::size_t s = 0; s < arc.samples.size(); ++s) {
        block[a][s] = eval_at_skeleton_sample(eval, neighbor, arc, s);
      }
    }
  });
  return out;
}

SkeletonField apply_T(const IterationOperator& op, const SkeletonField& field) {
  return op.apply(field);
}

void record_iterate(const IterationOperator& op, const SkeletonField& field, RunReport& report) {
  const std::size_t n_sub = op.skeletons().size();
  const auto& layers = op.layers();
  const int n = static_cast<int>(report.norms.size());
  std::vector<double> all(n_sub);
  std::vector<double> interior(n_sub);
  for (std::size_t i = 0; i < n_sub; ++i) {
    const int j = static_cast<int>(i) + 1;
    all[i] = field.max_all(j);
    interior[i] = field.max_interior(j, op.skeletons()[i]);
  }
  const double norm = field.norm_inf();
  const double high = 1.0 - report.tol_contr;
  const int m = std::min(n, layers.n_max);
  bool v = true;
  bool c = true;
  for (std::size_t i = 0; i < n_sub; ++i) {
    const int layer = layers.layer_of[i];
    if (layer <= m) {
      v = v && interior[i] < high;
      c = c && all[i] < high;
    } else {
      v = v && all[i] >= 1.0 - kQuadratureTol;
    }
  }
  report.norms.push_back(norm);
  report.max_all.push_back(std::move(all));
  report.max_interior.push_back(std::move(interior));
  report.in_v.push_back(v);
  report.in_c.push_back(c);
  if (report.first_contraction_index < 0 && norm < high) report.first_contraction_index = n;
}

RunReport run_error_recursion(const IterationOperator& op, int n_iters, double tol_contr) {
  if (n_iters < 1) throw Error(ErrorCode::InvalidInput, "n_iters must be >= 1");
  RunReport report;
  report.tol_contr = tol_contr;
  SkeletonField e = op.constant(1.0);
  record_iterate(op, e, report);
  for (int n = 1; n <= n_iters; ++n) {
    e = op.apply(e);
    record_iterate(op, e, report);
    if (report.norms.back() < kUnderflowGuard) {
      report.underflow = true;
      break;
    }
  }
  return report;
}

std::pair<SkeletonField, RunReport> solve_psm(const IterationOperator& op, const BoundaryData& g,
                                              const SkeletonField& init, int n_iters,
                                              double stop_tol) {
  if (!op.discretization().has_exterior()) {
    throw Error(ErrorCode::NoExteriorBoundary, "no subdomain touches the exterior boundary");
  }
  if (n_iters < 1) throw Error(ErrorCode::InvalidInput, "n_iters must be >= 1");
  const ExteriorData ext = g.as_exterior();
  RunReport report;
  SkeletonField u = init;
  record_iterate(op, u, report);
  for (int n = 1; n <= n_iters; ++n) {
    SkeletonField next = op.apply(u, ext);
    report.increments.push_back((next - u).norm_inf());
    u = std::move(next);
    record_iterate(op, u, report);
    if (report.increments.back() < stop_tol) break;
  }
  return {std::move(u), std::move(report)};
}

double operator_norm_estimate(const IterationOperator& op, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "power must be >= 1");
  SkeletonField e = op.constant(1.0);
  for (int i = 0; i < n; ++i) e = op.apply(e);
  return e.norm_inf();
}

double asymptotic_factor(const std::vector<double>& norms, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidInput, "window must be >= 1");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n = 0; n < norms.size(); ++n) {
    if (norms[n] > kUnderflowGuard) pts.emplace_back(static_cast<double>(n), std::log(norms[n]));
  }
  const auto need = static_cast<std::size_t>(window) + 1;
  if (pts.size() < need) {
    throw Error(ErrorCode::InsufficientIterations,
                "need " + std::to_string(need) + " norms above the underflow guard, have " +
                    std::to_string(pts.size()));
  }
  pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(need));
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(need);
  my /= static_cast<double>(need);
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return std::exp(sxy / sxx);
}

double asymptotic_factor(const RunReport& report, int window) {
  return asymptotic_factor(report.norms, window);
}

SkeletonField random_smooth_field(const std::vector<Skeleton>& skeletons, std::mt19937_64& rng,
                                  double lo, double hi) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  constexpr int kOrder = 3;
  SkeletonField field;
  field.values.resize(skeletons.size());
  for (std::size_t j = 0; j < skeletons.size(); ++j) {
    for (const auto& arc : skeletons[j].arcs) {
      std::array<double, kOrder + 1> a{};
      std::array<double, kOrder + 1> p{};
      double scale = 0.0;
      for (int m = 0; m <= kOrder; ++m) {
        a[static_cast<std::size_t>(m)] = coef(rng);
        p[static_cast<std::size_t>(m)] = phase(rng);
        scale += std::abs(a[static_cast<std::size_t>(m)]);
      }
      const std::size_t n = arc.samples.size();
      std::vector<double> v(n);
      for (std::size_t s = 0; s < n; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(n - 1);
        double sum = 0.0;
        for (int m = 0; m <= kOrder; ++m) {
          sum += a[static_cast<std::size_t>(m)] *
                 std::cos(std::numbers::pi * m * t + p[static_cast<std::size_t>(m)]);
        }
        // sum / scale lies in [-1, 1].
        v[s] = lo + (hi - lo) * 0.5 * (1.0 + sum / scale);
      }
      field.values[j].push_back(std::move(v));
    }
  }
  return field;
}

MonotonicityReport monotonicity_check(const IterationOperator& op, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MonotonicityReport report;
  report.trials = trials;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const SkeletonField v = random_smooth_field(op.skeletons(), rng);
    const SkeletonField f = random_smooth_field(op.skeletons(), rng);
    SkeletonField u = v;
    for (std::size_t j = 0; j < u.values.size(); ++j)
      for (std::size_t a = 0; a < u.values[j].size(); ++a)
        for (std::size_t s = 0; s < u.values[j][a].size(); ++s)
          u.values[j][a][s] += (1.0 - v.values[j][a][s]) * f.values[j][a][s];
    const SkeletonField tv = op.apply(v);
    const SkeletonField tu = op.apply(u);
    const SkeletonField diff = tv - tu;
    for (const auto& sub : diff.values)
      for (const auto& arc : sub)
        for (double x : arc) report.max_violation = std::max(report.max_violation, x);
    report.max_expansion = std::max({report.max_expansion, tv.norm_inf() - v.norm_inf(),
                                     tu.norm_inf() - u.norm_inf()});
  }
  return report;
}

}  // namespace psm
