#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "psm/common.hpp"

namespace psm {

/// A subdomain of the 2D union: the open disk with the given center and radius.
/// Ids are 1-based and contiguous within a geometry.
struct Disk {
  int id = 0;
  Vec2 center;
  double radius = 0.0;

  bool contains(Vec2 p) const { return dist(p, center) < radius; }
};

/// Half-open angular interval [start, start + width) on a circle. A width of
/// 2pi denotes the full circle.
struct AngularInterval {
  double start = 0.0;
  double width = 0.0;

  bool full() const { return width >= kTwoPi; }
  double end() const { return start + width; }
  /// Offset of `angle` from `start`, measured counter-clockwise in [0, 2pi).
  double offset(double angle) const { return wrap_angle(angle - start); }
  bool contains(double angle) const { return full() || offset(angle) < width; }
};

/// The part of circle `on` lying strictly inside disk `inside`, or nullopt
/// when the circle does not enter the disk.
std::optional<AngularInterval> covered_interval(const Disk& on, const Disk& inside);

/// Immutable validated union of disks with its neighbor sets.
class Geometry2D {
 public:
  std::size_t size() const { return disks_.size(); }
  const std::vector<Disk>& disks() const { return disks_; }
  const Disk& disk(int id) const { return disks_.at(static_cast<std::size_t>(id - 1)); }
  /// Sorted neighbor ids of subdomain `id`.
  const std::vector<int>& neighbors(int id) const {
    return neighbors_.at(static_cast<std::size_t>(id - 1));
  }
  bool are_neighbors(int a, int b) const;
  double tolerance() const { return tolerance_; }

 private:
  friend Geometry2D build_geometry(std::vector<Disk> disks, double tolerance);

  std::vector<Disk> disks_;
  std::vector<std::vector<int>> neighbors_;
  double tolerance_ = 1e-9;
};

inline constexpr double kDefaultGeometryTolerance = 1e-9;

/// Validates the disks and computes neighbor sets. Two disks are neighbors when
/// r_j + r_k - |c_j - c_k| exceeds tolerance * max(r_j, r_k). Throws
/// TangentIntersection, NoIntersection, Disconnected or InvalidInput.
Geometry2D build_geometry(std::vector<Disk> disks,
                          double tolerance = kDefaultGeometryTolerance);

/// A maximal sub-arc of a circle with constant covering set. An empty label
/// marks an exterior piece.
struct ArcPiece {
  int owner = 0;
  AngularInterval interval;
  std::vector<int> label;

  bool exterior() const { return label.empty(); }
  std::size_t multiplicity() const { return label.size(); }
  bool covered_by(int k) const;
};

/// Pieces of circle j ordered counter-clockwise from the first breakpoint.
/// Throws DegenerateArc when a piece is narrower than the geometry tolerance.
std::vector<ArcPiece> partition_boundary(const Geometry2D& geom, int j);

struct SkeletonSample {
  double angle = 0.0;  // on the neighbor circle
  Vec2 point;
  bool on_owner_boundary = false;
};

/// S_{j,k}: the arc of circle k inside the closed disk j.
struct SkeletonArc {
  int neighbor = 0;
  AngularInterval interval;
  std::vector<SkeletonSample> samples;
};

struct Skeleton {
  int owner = 0;
  std::vector<SkeletonArc> arcs;

  std::size_t sample_count() const;
  /// Index of the arc lying on circle `neighbor`, or -1.
  int arc_index(int neighbor) const;
};

inline constexpr std::size_t kDefaultSamplesPerArc = 257;

/// One skeleton per subdomain, ordered by id. Partial arcs are sampled
/// uniformly in angle including both endpoints.
std::vector<Skeleton> build_skeletons(const Geometry2D& geom,
                                      std::size_t samples_per_arc = kDefaultSamplesPerArc);

/// Active-set mask indexed by id - 1.
using ActiveSet = std::vector<bool>;

/// Fraction of circle j not covered by the other active disks, computed by
/// exact interval union.
double exposure_fraction_2d(const Geometry2D& geom, int j, const ActiveSet& active);

/// Total measure of the union of intervals, each at most one full turn.
double union_measure(const std::vector<AngularInterval>& intervals);

/// Text format: header `# disks2d v1`, then `id cx cy r` per line; `#` starts
/// a comment.
std::vector<Disk> read_disks(std::istream& in);
void write_disks(std::ostream& out, const std::vector<Disk>& disks);

}  // namespace psm
