#include "psm/harmonic2d.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>

namespace psm {

void QuadratureConfig::validate() const {
  if (nodes_per_piece < 4) throw Error(ErrorCode::InvalidInput, "nodes_per_piece must be >= 4");
  if (!(min_distance > 0.0) || min_distance >= 1.0) {
    throw Error(ErrorCode::InvalidInput, "min_distance must lie in (0, 1)");
  }
  if (!(endpoint_offset > 0.0) || endpoint_offset >= 0.5) {
    throw Error(ErrorCode::InvalidInput, "endpoint_offset must lie in (0, 0.5)");
  }
  if (!(far_ratio > 0.0)) throw Error(ErrorCode::InvalidInput, "far_ratio must be positive");
  if (!(max_panel_angle > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "max_panel_angle must be positive");
  }
  if (max_levels < 0) throw Error(ErrorCode::InvalidInput, "max_levels must be >= 0");
}

BoundaryTrace BoundaryTrace::from_function(int owner, const std::vector<ArcPiece>& partition,
                                           std::function<double(double)> f) {
  BoundaryTrace t{owner, {}};
  for (const auto& p : partition) t.pieces.push_back({p.interval, p.label, f});
  return t;
}

BoundaryTrace BoundaryTrace::from_function(int owner, std::function<double(double)> f) {
  return BoundaryTrace{owner, {{AngularInterval{0.0, kTwoPi}, {}, std::move(f)}}};
}

std::size_t BoundaryTrace::piece_at(double angle) const {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].interval.contains(angle)) return i;
  }
  // Rounding at a breakpoint: take the piece whose start is closest.
  std::size_t best = 0;
  double gap = kTwoPi;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double d = std::min(pieces[i].interval.offset(angle), kTwoPi - pieces[i].interval.offset(angle));
    if (d < gap) {
      gap = d;
      best = i;
    }
  }
  return best;
}

namespace {

struct GaussTable {
  std::vector<double> x;
  std::vector<double> w;
};

GaussTable gauss_legendre(int n) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  if (!table) throw Error(ErrorCode::InvalidInput, "cannot build Gauss-Legendre table");
  GaussTable g;
  g.x.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &g.x[static_cast<std::size_t>(i)],
                                  &g.w[static_cast<std::size_t>(i)], table);
  }
  gsl_integration_glfixed_table_free(table);
  return g;
}

// Squared distance between a point at polar (rho, phi) and the circle point at
// angle theta, free of cancellation when the two are close.
inline double chord2(double r, double rho, double phi, double theta) {
  const double s = std::sin(0.5 * (theta - phi));
  const double gap = r - rho;
  return gap * gap + 4.0 * r * rho * s * s;
}

}  // namespace

PoissonEvaluator::PoissonEvaluator(const Disk& disk, const BoundaryTrace& trace,
                                   const QuadratureConfig& quad)
    : disk_(disk), trace_(&trace), quad_(quad) {
  quad_.validate();
  auto table = gauss_legendre(quad_.nodes_per_piece);
  ref_x_ = std::move(table.x);
  ref_w_ = std::move(table.w);
  const std::size_t n = ref_x_.size();
  for (std::size_t p = 0; p < trace.pieces.size(); ++p) {
    const auto& piece = trace.pieces[p];
    const auto count =
        static_cast<std::size_t>(std::max(1.0, std::ceil(piece.interval.width / quad_.max_panel_angle)));
    const double width = piece.interval.width / static_cast<double>(count);
    for (std::size_t c = 0; c < count; ++c) {
      const double lo = piece.interval.start + width * static_cast<double>(c);
      panels_.push_back({lo, width, p, node_w_.size()});
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = lo + 0.5 * (ref_x_[i] + 1.0) * width;
        node_cos_.push_back(std::cos(theta));
        node_sin_.push_back(std::sin(theta));
        node_w_.push_back(0.5 * width * ref_w_[i]);
        node_g_.push_back(piece.value(theta));
      }
    }
  }
}

void PoissonEvaluator::accumulate(const Panel& panel, bool cached, int level, double px, double py,
                                  double rho, double phi, double& num, double& den) const {
  const double r = disk_.radius;
  double d;
  if (wrap_angle(phi - panel.lo) <= panel.width) {
    d = r - rho;
  } else {
    d = std::sqrt(std::min(chord2(r, rho, phi, panel.lo), chord2(r, rho, phi, panel.lo + panel.width)));
  }
  const std::size_t n = ref_x_.size();
  if (d >= quad_.far_ratio * r * panel.width || level >= quad_.max_levels) {
    if (cached) {
      for (std::size_t i = panel.node0; i < panel.node0 + n; ++i) {
        const double dx = px - r * node_cos_[i];
        const double dy = py - r * node_sin_[i];
        const double k = node_w_[i] / (dx * dx + dy * dy);
        num += k * node_g_[i];
        den += k;
      }
    } else {
      const auto& f = trace_->pieces[panel.piece].value;
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = panel.lo + 0.5 * (ref_x_[i] + 1.0) * panel.width;
        const double k = 0.5 * panel.width * ref_w_[i] / chord2(r, rho, phi, theta);
        num += k * f(theta);
        den += k;
      }
    }
    return;
  }
  const double half = 0.5 * panel.width;
  accumulate({panel.lo, half, panel.piece, 0}, false, level + 1, px, py, rho, phi, num, den);
  accumulate({panel.lo + half, half, panel.piece, 0}, false, level + 1, px, py, rho, phi, num, den);
}

double PoissonEvaluator::operator()(Vec2 x) const { return at_offset(x - disk_.center); }

double PoissonEvaluator::at_offset(Vec2 offset) const {
  const double px = offset.x;
  const double py = offset.y;
  const double rho = std::hypot(px, py);
  if (!(rho < disk_.radius)) {
    throw Error(ErrorCode::TooCloseToBoundary, "evaluation point is not inside disk " +
                                                   std::to_string(disk_.id));
  }
  const double phi = std::atan2(py, px);
  double num = 0.0;
  double den = 0.0;
  for (const auto& panel : panels_) accumulate(panel, true, 0, px, py, rho, phi, num, den);
  return num / den;
}

double poisson_eval(const Disk& disk, const BoundaryTrace& trace, Vec2 x,
                    const QuadratureConfig& quad) {
  if (dist(x, disk.center) >= disk.radius * (1.0 - quad.min_distance)) {
    throw Error(ErrorCode::TooCloseToBoundary,
                "point is within min_distance of circle " + std::to_string(disk.id));
  }
  return PoissonEvaluator(disk, trace, quad)(x);
}

SkeletonField SkeletonField::constant(const std::vector<Skeleton>& skeletons, double c) {
  return from_function(skeletons, [c](int, const SkeletonSample&) { return c; });
}

SkeletonField SkeletonField::from_function(
    const std::vector<Skeleton>& skeletons,
    const std::function<double(int, const SkeletonSample&)>& f) {
  SkeletonField field;
  field.values.resize(skeletons.size());
  for (std::size_t j = 0; j < skeletons.size(); ++j) {
    for (const auto& arc : skeletons[j].arcs) {
      std::vector<double> v;
      v.reserve(arc.samples.size());
      for (const auto& s : arc.samples) v.push_back(f(skeletons[j].owner, s));
      field.values[j].push_back(std::move(v));
    }
  }
  return field;
}

double SkeletonField::norm_inf() const {
  double m = 0.0;
  for (const auto& sub : values)
    for (const auto& arc : sub)
      for (double v : arc) m = std::max(m, std::abs(v));
  return m;
}

double SkeletonField::max_all(int j) const {
  double m = 0.0;
  for (const auto& arc : values.at(static_cast<std::size_t>(j - 1)))
    for (double v : arc) m = std::max(m, std::abs(v));
  return m;
}

double SkeletonField::max_interior(int j, const Skeleton& skeleton) const {
  double m = 0.0;
  const auto& sub = values.at(static_cast<std::size_t>(j - 1));
  for (std::size_t a = 0; a < sub.size(); ++a) {
    for (std::size_t s = 0; s < sub[a].size(); ++s) {
      if (!skeleton.arcs[a].samples[s].on_owner_boundary) m = std::max(m, std::abs(sub[a][s]));
    }
  }
  return m;
}

std::size_t SkeletonField::sample_count() const {
  std::size_t n = 0;
  for (const auto& sub : values)
    for (const auto& arc : sub) n += arc.size();
  return n;
}

SkeletonField operator-(const SkeletonField& a, const SkeletonField& b) {
  SkeletonField out = a;
  for (std::size_t j = 0; j < out.values.size(); ++j)
    for (std::size_t k = 0; k < out.values[j].size(); ++k)
      for (std::size_t s = 0; s < out.values[j][k].size(); ++s)
        out.values[j][k][s] -= b.values.at(j).at(k).at(s);
  return out;
}

bool Discretization::has_exterior() const {
  for (const auto& pieces : partitions)
    for (const auto& p : pieces)
      if (p.exterior()) return true;
  return false;
}

Discretization discretize(Geometry2D geom, std::size_t samples_per_arc) {
  Discretization d;
  for (const Disk& disk : geom.disks()) d.partitions.push_back(partition_boundary(geom, disk.id));
  d.skeletons = build_skeletons(geom, samples_per_arc);
  d.geom = std::move(geom);
  return d;
}

namespace {

// Monotone cubic interpolation of one skeleton arc in its own angle offset.
class ArcInterpolant {
 public:
  ArcInterpolant(const SkeletonArc& arc, const std::vector<double>& values)
      : start_(arc.interval.start), width_(arc.interval.width), full_(arc.interval.full()) {
    const std::size_t n = values.size();
    std::vector<double> x;
    std::vector<double> y(values);
    x.reserve(n + 1);
    for (const auto& s : arc.samples) x.push_back(wrap_angle(s.angle - start_));
    x.front() = 0.0;
    if (full_) {
      x.push_back(kTwoPi);
      y.push_back(values.front());
    } else {
      x.back() = width_;
    }
    hi_ = x.back();
    interp_.emplace(std::move(x), std::move(y));
  }

  double operator()(double angle) const {
    double off = wrap_angle(angle - start_);
    if (!full_ && off > width_) off = off - width_ < kTwoPi - off ? width_ : 0.0;
    return (*interp_)(std::clamp(off, 0.0, hi_));
  }

 private:
  double start_;
  double width_;
  bool full_;
  double hi_ = 0.0;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

struct TraceContext {
  Disk disk;
  PoUSpec pou;
  std::vector<ArcInterpolant> interps;
};

}  // namespace

BoundaryTrace assemble_interior_trace(const Discretization& disc, int j, const SkeletonField& field,
                                      const PoUSpec& pou, const ExteriorData& g) {
  const Disk& disk = disc.geom.disk(j);
  auto ctx = std::make_shared<TraceContext>(TraceContext{disk, pou, {}});
  std::vector<int> slot(disc.geom.size() + 1, -1);
  for (const ArcPiece& piece : disc.partition(j)) {
    for (int k : piece.label) {
      if (slot[static_cast<std::size_t>(k)] >= 0) continue;
      const Skeleton& sk = disc.skeleton(k);
      const int a = sk.arc_index(j);
      const auto& vals = field.values.at(static_cast<std::size_t>(k - 1));
      if (a < 0 || static_cast<std::size_t>(a) >= vals.size() ||
          vals[static_cast<std::size_t>(a)].size() < 4 ||
          vals[static_cast<std::size_t>(a)].size() != sk.arcs[static_cast<std::size_t>(a)].samples.size()) {
        throw Error(ErrorCode::MissingSkeletonData,
                    "no usable samples of subdomain " + std::to_string(k) + " on circle " +
                        std::to_string(j));
      }
      slot[static_cast<std::size_t>(k)] = static_cast<int>(ctx->interps.size());
      ctx->interps.emplace_back(sk.arcs[static_cast<std::size_t>(a)], vals[static_cast<std::size_t>(a)]);
    }
  }

  BoundaryTrace trace{j, {}};
  for (const ArcPiece& piece : disc.partition(j)) {
    std::function<double(double)> f;
    if (piece.exterior()) {
      if (g) {
        f = [g, c = disk.center, r = disk.radius](double theta) { return g(polar(c, r, theta)); };
      } else {
        f = [](double) { return 0.0; };
      }
    } else {
      std::vector<int> which;
      for (int k : piece.label) which.push_back(slot[static_cast<std::size_t>(k)]);
      f = [ctx, piece, which](double theta) {
        const Vec2 x = polar(ctx->disk.center, ctx->disk.radius, theta);
        std::array<double, 16> small{};
        std::vector<double> big;
        std::span<double> w;
        if (which.size() <= small.size()) {
          w = std::span<double>(small.data(), which.size());
        } else {
          big.resize(which.size());
          w = big;
        }
        ctx->pou.weights(piece, x, w);
        double v = 0.0;
        for (std::size_t i = 0; i < which.size(); ++i) {
          if (w[i] != 0.0) v += w[i] * ctx->interps[static_cast<std::size_t>(which[i])](theta);
        }
        return v;
      };
    }
    trace.pieces.push_back({piece.interval, piece.label, std::move(f)});
  }
  return trace;
}

double eval_at_skeleton_sample(const PoissonEvaluator& eval, const Disk& neighbor,
                               const SkeletonArc& arc, std::size_t index) {
  const SkeletonSample& sample = arc.samples.at(index);
  const Disk& own = eval.disk();
  if (!sample.on_owner_boundary) return eval(sample.point);

  const BoundaryTrace& trace = eval.trace();
  const double phi = wrap_angle(std::atan2(sample.point.y - own.center.y, sample.point.x - own.center.x));
  // The endpoint sits on a breakpoint of circle j: find the pieces on either side.
  std::size_t after = 0;
  double gap = kTwoPi;
  for (std::size_t i = 0; i < trace.pieces.size(); ++i) {
    const double off = trace.pieces[i].interval.offset(phi);
    const double d = std::min(off, kTwoPi - off);
    if (d < gap) {
      gap = d;
      after = i;
    }
  }
  const std::size_t before = (after + trace.pieces.size() - 1) % trace.pieces.size();
  auto covers = [&](std::size_t i) {
    const auto& l = trace.pieces[i].label;
    return std::binary_search(l.begin(), l.end(), neighbor.id);
  };
  const std::size_t inside = covers(after) || !covers(before) ? after : before;
  const std::size_t outside = inside == after ? before : after;

  const double dir = index == 0 ? 1.0 : -1.0;
  if (!trace.pieces[outside].label.empty()) {
    // Near a jump of the data the extension behaves like the half-plane
    // solution g+ + (g- - g+) * omega / pi, where omega is the angle between
    // the counter-clockwise boundary tangent and the direction of approach.
    // For continuous data both sides agree and this is the trace value.
    const double g_after = trace.pieces[after].value(phi);
    const double g_before = trace.pieces[before].value(phi);
    if (g_after == g_before) return g_after;
    const Vec2 tangent{-std::sin(phi), std::cos(phi)};
    const Vec2 approach{-dir * std::sin(sample.angle), dir * std::cos(sample.angle)};
    const double omega = std::atan2(tangent.x * approach.y - tangent.y * approach.x,
                                    tangent.x * approach.x + tangent.y * approach.y);
    const double t = std::clamp(omega / std::numbers::pi, 0.0, 1.0);
    return g_after + (g_before - g_after) * t;
  }

  // Work relative to the owner's center: absolute coordinates would carry
  // rounding of order eps * |center|, which is not small next to the offset.
  const Vec2 shift = neighbor.center - own.center;
  double delta = eval.config().endpoint_offset * own.radius / neighbor.radius;
  for (int attempt = 0; attempt < 60; ++attempt, delta *= 2.0) {
    const Vec2 x = polar(shift, neighbor.radius, sample.angle + dir * delta);
    if (norm(x) < own.radius) return eval.at_offset(x);
  }
  throw Error(ErrorCode::TooCloseToBoundary, "cannot retract skeleton endpoint into disk " +
                                                 std::to_string(own.id));
}

}  // namespace psm
