#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "psm/geometry2d.hpp"

namespace psm {

enum class PoUKind { Continuous, Discontinuous };

const char* to_string(PoUKind kind);
PoUKind parse_pou_kind(const std::string& text);

/// Partition of unity on the interior boundaries. Weights are evaluated per
/// arc piece, in the order of `piece.label`.
class PoUSpec {
 public:
  /// Picks the single neighbor that supplies data on a multiply covered piece
  /// of circle j (discontinuous kind only).
  using Selector = std::function<int(int j, const std::vector<int>& label)>;

  PoUSpec(const Geometry2D& geom, PoUKind kind, Selector selector = {});

  PoUKind kind() const { return kind_; }

  /// Weights chi_j^k(x) for k in piece.label, written to `out` (same length as
  /// the label). Exterior pieces have no weights.
  void weights(const ArcPiece& piece, Vec2 x, std::span<double> out) const;

  /// chi_j^k(x) for a point x on circle j lying on `piece`; zero when k does
  /// not cover the piece.
  double weight(const ArcPiece& piece, int k, Vec2 x) const;

 private:
  std::vector<Disk> disks_;
  PoUKind kind_;
  Selector selector_;
};

/// Normalized radial penetration depths.
PoUSpec continuous_pou(const Geometry2D& geom);

/// Lowest covering index takes weight 1.
PoUSpec discontinuous_pou(const Geometry2D& geom);

/// Three-disk cyclic assignment: disk j prefers neighbor (j mod 3) + 1 when it
/// covers the piece, otherwise the lowest covering index.
PoUSpec cyclic_three_disk_pou(const Geometry2D& geom);

struct PoUReport {
  double max_sum_error = 0.0;        // over interior-piece samples
  double max_exterior_weight = 0.0;  // over exterior-piece samples
  std::size_t range_violations = 0;
  double max_jump = 0.0;  // largest change between consecutive samples in a piece
  std::size_t samples_checked = 0;

  bool ok(double tol = 1e-12) const {
    return max_sum_error <= tol && max_exterior_weight == 0.0 && range_violations == 0;
  }
};

/// Samples every piece at `samples` interior points and checks sum, range and
/// exterior annihilation. Violations are reported, never thrown.
PoUReport verify_pou(const PoUSpec& spec, const Geometry2D& geom, std::size_t samples);

}  // namespace psm
