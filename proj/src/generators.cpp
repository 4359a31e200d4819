#include "psm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace psm {

const char* to_string(Family family) {
  switch (family) {
    case Family::Chain: return "chain";
    case Family::HexLayers: return "hex";
    case Family::QuadLayers: return "quad";
    case Family::TriLattice: return "tri";
  }
  return "?";
}

Family parse_family(const std::string& text) {
  if (text == "chain") return Family::Chain;
  if (text == "hex" || text == "hex_layers") return Family::HexLayers;
  if (text == "quad" || text == "quad_layers") return Family::QuadLayers;
  if (text == "tri" || text == "tri_lattice") return Family::TriLattice;
  throw Error(ErrorCode::InvalidSpec, "unknown family '" + text + "'");
}

double GeneratorSpec::effective_spacing() const {
  if (spacing != 0.0) return spacing;
  return (family == Family::QuadLayers ? 1.4 : 1.5) * radius;
}

namespace {

void sort_row_major(std::vector<Vec2>& centers) {
  const double eps = 1e-9;
  std::sort(centers.begin(), centers.end(), [eps](Vec2 a, Vec2 b) {
    if (std::abs(a.y - b.y) > eps) return a.y < b.y;
    return a.x < b.x;
  });
}

}  // namespace

std::vector<Disk> generate_disks(const GeneratorSpec& spec) {
  const double r = spec.radius;
  const double s = spec.effective_spacing();
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidSpec, "radius must be positive");
  if (!(s > 0.0) || !(s < 2.0 * r)) {
    throw Error(ErrorCode::InvalidSpec, "spacing must lie in (0, 2 radius) so neighbors overlap");
  }
  if (spec.size < 2) throw Error(ErrorCode::InvalidSpec, "size must be at least 2");
  if (spec.family == Family::QuadLayers && !(std::sqrt(2.0) * s < 2.0 * r)) {
    throw Error(ErrorCode::InvalidSpec,
                "quad spacing must keep diagonal neighbors overlapping (sqrt(2) s < 2 r)");
  }

  std::vector<Vec2> centers;
  const int n = spec.size;
  switch (spec.family) {
    case Family::Chain:
      for (int i = 0; i < n; ++i) centers.push_back({s * i, 0.0});
      break;
    case Family::HexLayers: {
      // Axial coordinates within hexagonal distance n - 1 of the origin.
      const int m = n - 1;
      for (int q = -m; q <= m; ++q) {
        for (int t = -m; t <= m; ++t) {
          if (std::max({std::abs(q), std::abs(t), std::abs(q + t)}) > m) continue;
          centers.push_back({s * (q + 0.5 * t), s * std::sqrt(3.0) / 2.0 * t});
        }
      }
      break;
    }
    case Family::QuadLayers: {
      const int m = n - 1;
      for (int i = -m; i <= m; ++i)
        for (int k = -m; k <= m; ++k) centers.push_back({s * i, s * k});
      break;
    }
    case Family::TriLattice:
      for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col)
          centers.push_back({s * (col + 0.5 * (row % 2)), s * std::sqrt(3.0) / 2.0 * row});
      break;
  }
  sort_row_major(centers);
  std::vector<Disk> disks;
  disks.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    disks.push_back({static_cast<int>(i) + 1, centers[i], r});
  }
  return disks;
}

Geometry2D generate(const GeneratorSpec& spec) { return build_geometry(generate_disks(spec)); }

Geometry2D chain(int n, double radius, double spacing) {
  return generate({Family::Chain, n, radius, spacing});
}
Geometry2D hex_layers(int layers, double radius, double spacing) {
  return generate({Family::HexLayers, layers, radius, spacing});
}
Geometry2D quad_layers(int layers, double radius, double spacing) {
  return generate({Family::QuadLayers, layers, radius, spacing});
}
Geometry2D tri_lattice(int side, double radius, double spacing) {
  return generate({Family::TriLattice, side, radius, spacing});
}

}  // namespace psm
