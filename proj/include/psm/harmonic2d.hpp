#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "psm/geometry2d.hpp"
#include "psm/pou.hpp"

namespace psm {

struct QuadratureConfig {
  /// Gauss-Legendre nodes per panel.
  int nodes_per_piece = 32;
  /// Pieces are cut into panels no wider than this angle before any refinement.
  double max_panel_angle = kTwoPi / 8.0;
  /// A panel is integrated as is when the evaluation point is at least
  /// far_ratio * panel length away from it; otherwise it is bisected.
  double far_ratio = 0.3;
  int max_levels = 60;
  /// poisson_eval refuses points closer than min_distance * r to the circle.
  double min_distance = 1e-4;
  /// Arc-length retraction (relative to the owner radius) used for skeleton
  /// endpoints that touch the exterior boundary.
  double endpoint_offset = 1e-7;

  void validate() const;
};

/// Dirichlet data on one circle: a function of the angle on each arc piece.
/// Piece functions must accept any angle in the closure of their interval.
struct TracePiece {
  AngularInterval interval;
  std::vector<int> label;
  std::function<double(double)> value;
};

struct BoundaryTrace {
  int owner = 0;
  std::vector<TracePiece> pieces;

  /// Same function on every piece of the given partition.
  static BoundaryTrace from_function(int owner, const std::vector<ArcPiece>& partition,
                                     std::function<double(double)> f);
  /// Single full-circle piece.
  static BoundaryTrace from_function(int owner, std::function<double(double)> f);

  /// Index of the piece whose half-open interval contains `angle`.
  std::size_t piece_at(double angle) const;
};

/// Poisson integral of a fixed trace on a fixed disk. Base-node trace values
/// are cached so repeated evaluations only pay for the kernel and for the
/// refined nodes near the evaluation point.
class PoissonEvaluator {
 public:
  PoissonEvaluator(const Disk& disk, const BoundaryTrace& trace, const QuadratureConfig& quad);

  const Disk& disk() const { return disk_; }
  const QuadratureConfig& config() const { return quad_; }
  const BoundaryTrace& trace() const { return *trace_; }

  /// Harmonic extension at any point strictly inside the disk; no distance
  /// precondition. The kernel is normalized by its discrete mass so constant
  /// data is reproduced exactly.
  double operator()(Vec2 x) const;
  /// Same, at the point center + offset.
  double at_offset(Vec2 offset) const;

 private:
  struct Panel {
    double lo;
    double width;
    std::size_t piece;
    std::size_t node0;
  };

  void accumulate(const Panel& panel, bool cached, int level, double px, double py, double rho,
                  double phi, double& num, double& den) const;

  Disk disk_;
  const BoundaryTrace* trace_;
  QuadratureConfig quad_;
  std::vector<double> ref_x_;
  std::vector<double> ref_w_;
  std::vector<Panel> panels_;
  std::vector<double> node_cos_;
  std::vector<double> node_sin_;
  std::vector<double> node_w_;
  std::vector<double> node_g_;
};

/// Harmonic extension of `trace` at x. Throws TooCloseToBoundary when
/// |x - c| >= r (1 - min_distance).
double poisson_eval(const Disk& disk, const BoundaryTrace& trace, Vec2 x,
                    const QuadratureConfig& quad = {});

/// Sampled scalar values on every skeleton arc: values[j-1][arc][sample].
struct SkeletonField {
  std::vector<std::vector<std::vector<double>>> values;

  static SkeletonField constant(const std::vector<Skeleton>& skeletons, double c);
  /// Each sample gets f(owner id, sample).
  static SkeletonField from_function(const std::vector<Skeleton>& skeletons,
                                     const std::function<double(int, const SkeletonSample&)>& f);

  double norm_inf() const;
  /// Max over all samples of subdomain j.
  double max_all(int j) const;
  /// Max over samples of subdomain j that do not lie on its boundary.
  double max_interior(int j, const Skeleton& skeleton) const;
  std::size_t sample_count() const;
};

SkeletonField operator-(const SkeletonField& a, const SkeletonField& b);

/// Geometry plus its boundary partitions and skeletons, derived once.
struct Discretization {
  Geometry2D geom;
  std::vector<std::vector<ArcPiece>> partitions;
  std::vector<Skeleton> skeletons;

  const std::vector<ArcPiece>& partition(int j) const {
    return partitions.at(static_cast<std::size_t>(j - 1));
  }
  const Skeleton& skeleton(int j) const { return skeletons.at(static_cast<std::size_t>(j - 1)); }
  bool has_exterior() const;
};

Discretization discretize(Geometry2D geom, std::size_t samples_per_arc = kDefaultSamplesPerArc);

/// Data on exterior pieces as a function of the boundary point; an empty
/// function means zero.
using ExteriorData = std::function<double(Vec2)>;

/// Trace on circle j built from the neighbors' skeleton values: on a piece with
/// covering set alpha it is sum_k field_k * chi_j^k, with field_k interpolated
/// in angle by monotone cubics along S_{k,j}. Exterior pieces carry `g`.
BoundaryTrace assemble_interior_trace(const Discretization& disc, int j, const SkeletonField& field,
                                      const PoUSpec& pou, const ExteriorData& g = {});

/// R_j applied to one sample of S_{j,k}. Interior samples use the Poisson
/// integral. An endpoint on circle j between two interior pieces gets the
/// limit of the extension along the arc: the trace value where the trace is
/// continuous, otherwise the two one-sided values weighted by the approach
/// angle. An endpoint next to exterior boundary is retracted along the arc by
/// endpoint_offset and evaluated there.
double eval_at_skeleton_sample(const PoissonEvaluator& eval, const Disk& neighbor,
                               const SkeletonArc& arc, std::size_t index);

}  // namespace psm
