#pragma once

#include <string>
#include <vector>

#include "psm/geometry2d.hpp"

namespace psm {

enum class Family { Chain, HexLayers, QuadLayers, TriLattice };

const char* to_string(Family family);
/// Accepts chain, hex, quad, tri (and the long forms hex_layers, quad_layers, tri_lattice).
Family parse_family(const std::string& text);

struct GeneratorSpec {
  Family family = Family::HexLayers;
  /// Disk count for chain, layer count for hex/quad, side length for tri.
  int size = 2;
  double radius = 1.0;
  /// Center spacing; 0 selects the family default (1.5 r, or 1.4 r for quad).
  double spacing = 0.0;

  double effective_spacing() const;
};

/// Disk list for the spec, ids in row-major order (rows bottom to top, left to
/// right within a row). Throws InvalidSpec on bad parameters.
std::vector<Disk> generate_disks(const GeneratorSpec& spec);

/// generate_disks followed by build_geometry.
Geometry2D generate(const GeneratorSpec& spec);

Geometry2D chain(int n, double radius = 1.0, double spacing = 1.5);
Geometry2D hex_layers(int layers, double radius = 1.0, double spacing = 1.5);
Geometry2D quad_layers(int layers, double radius = 1.0, double spacing = 1.4);
Geometry2D tri_lattice(int side, double radius = 1.0, double spacing = 1.5);

}  // namespace psm
