#include "psm/pou.hpp"

#include <algorithm>

namespace psm {

const char* to_string(PoUKind kind) {
  return kind == PoUKind::Continuous ? "continuous" : "discontinuous";
}

PoUKind parse_pou_kind(const std::string& text) {
  if (text == "continuous") return PoUKind::Continuous;
  if (text == "discontinuous") return PoUKind::Discontinuous;
  throw Error(ErrorCode::InvalidInput, "unknown partition of unity '" + text + "'");
}

PoUSpec::PoUSpec(const Geometry2D& geom, PoUKind kind, Selector selector)
    : disks_(geom.disks()), kind_(kind), selector_(std::move(selector)) {}

void PoUSpec::weights(const ArcPiece& piece, Vec2 x, std::span<double> out) const {
  const auto& label = piece.label;
  if (out.size() != label.size()) {
    throw Error(ErrorCode::InvalidInput, "weight buffer does not match the covering set");
  }
  if (label.empty()) return;
  if (label.size() == 1) {
    out[0] = 1.0;
    return;
  }
  if (kind_ == PoUKind::Discontinuous) {
    const int chosen = selector_ ? selector_(piece.owner, label) : label.front();
    for (std::size_t i = 0; i < label.size(); ++i) out[i] = label[i] == chosen ? 1.0 : 0.0;
    return;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const Disk& d = disks_[static_cast<std::size_t>(label[i] - 1)];
    out[i] = std::max(0.0, d.radius - dist(x, d.center));
    total += out[i];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroDenominator,
                "point on circle " + std::to_string(piece.owner) +
                    " is inside none of its covering neighbors");
  }
  for (double& w : out) w /= total;
}

double PoUSpec::weight(const ArcPiece& piece, int k, Vec2 x) const {
  const auto it = std::lower_bound(piece.label.begin(), piece.label.end(), k);
  if (it == piece.label.end() || *it != k) return 0.0;
  std::vector<double> w(piece.label.size());
  weights(piece, x, w);
  return w[static_cast<std::size_t>(it - piece.label.begin())];
}

PoUSpec continuous_pou(const Geometry2D& geom) { return PoUSpec(geom, PoUKind::Continuous); }

PoUSpec discontinuous_pou(const Geometry2D& geom) {
  return PoUSpec(geom, PoUKind::Discontinuous);
}

PoUSpec cyclic_three_disk_pou(const Geometry2D& geom) {
  return PoUSpec(geom, PoUKind::Discontinuous, [](int j, const std::vector<int>& label) {
    const int preferred = j % 3 + 1;
    return std::binary_search(label.begin(), label.end(), preferred) ? preferred : label.front();
  });
}

PoUReport verify_pou(const PoUSpec& spec, const Geometry2D& geom, std::size_t samples) {
  PoUReport report;
  std::vector<double> w;
  std::vector<double> prev;
  for (const Disk& disk : geom.disks()) {
    for (const ArcPiece& piece : partition_boundary(geom, disk.id)) {
      w.assign(piece.label.size(), 0.0);
      prev.clear();
      for (std::size_t s = 0; s < samples; ++s) {
        const double t = (static_cast<double>(s) + 0.5) / static_cast<double>(samples);
        const Vec2 x = polar(disk.center, disk.radius, piece.interval.start + t * piece.interval.width);
        ++report.samples_checked;
        if (piece.exterior()) {
          // Every neighbor weight vanishes off the interior boundary.
          for (int k : geom.neighbors(disk.id)) {
            report.max_exterior_weight =
                std::max(report.max_exterior_weight, std::abs(spec.weight(piece, k, x)));
          }
          continue;
        }
        spec.weights(piece, x, w);
        double sum = 0.0;
        for (double v : w) {
          if (!(v >= 0.0 && v <= 1.0)) ++report.range_violations;
          sum += v;
        }
        report.max_sum_error = std::max(report.max_sum_error, std::abs(sum - 1.0));
        if (!prev.empty()) {
          for (std::size_t i = 0; i < w.size(); ++i) {
            report.max_jump = std::max(report.max_jump, std::abs(w[i] - prev[i]));
          }
        }
        prev = w;
      }
    }
  }
  return report;
}

}  // namespace psm
