#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "psm/geometry2d.hpp"

namespace psm {

/// Undirected neighbor lists over vertices 1..N (index id - 1).
using Adjacency = std::vector<std::vector<int>>;

struct LayerAssignment {
  std::vector<int> layer_of;  // index id - 1, layers start at 1
  int n_max = 0;

  int layer(int id) const { return layer_of.at(static_cast<std::size_t>(id - 1)); }
  /// Vertex ids grouped by layer; element 0 holds layer 1.
  std::vector<std::vector<int>> groups() const;
};

using ExposureFn = std::function<double(int j, const ActiveSet& active)>;

/// Repeatedly removes every active vertex whose exposure exceeds `exposure_eps`.
/// Throws NoBoundaryNode when a nonempty active set exposes nothing.
LayerAssignment peel_layers(const ExposureFn& exposure, std::size_t n_vertices,
                            double exposure_eps);

inline constexpr double kDefaultExposureEps2d = 1e-6;

LayerAssignment peel_layers_2d(const Geometry2D& geom, double exposure_eps = kDefaultExposureEps2d);

Adjacency adjacency(const Geometry2D& geom);

/// True when every vertex of layer m >= 2 has a neighbor in layer m - 1.
bool has_monotone_neighbors(const LayerAssignment& layers, const Adjacency& adj);

struct Ball {
  int id = 0;
  Vec3 center;
  double radius = 0.0;
};

/// `n` quasi-uniform unit vectors on the sphere (golden-angle spiral).
std::vector<Vec3> fibonacci_sphere(std::size_t n);

inline constexpr std::size_t kDefaultDirections = 4096;

/// Neighbor lists by positive penetration depth, relative tolerance as in 2D.
Adjacency ball_neighbors(const std::vector<Ball>& balls, double tolerance = 1e-9);

/// Fraction of lattice directions on sphere j outside every other active ball.
double exposure_fraction_3d(const std::vector<Ball>& balls, int j, const ActiveSet& active,
                            std::size_t n_dirs = kDefaultDirections);

/// Layer peeling for balls. Equivalent to peel_layers with exposure_fraction_3d
/// but keeps per-direction cover counts and updates them as balls are removed.
/// A negative eps selects the default 2 / n_dirs.
LayerAssignment peel_layers_3d(const std::vector<Ball>& balls,
                               std::size_t n_dirs = kDefaultDirections, double exposure_eps = -1.0);

/// Per-ball maximum number of neighbors simultaneously covering one lattice
/// direction of its sphere.
std::vector<int> max_cover_degree(const std::vector<Ball>& balls,
                                  std::size_t n_dirs = kDefaultDirections);

/// Text format: header `# balls3d v1`, then `id cx cy cz r` per line.
std::vector<Ball> read_balls(std::istream& in);
void write_balls(std::ostream& out, const std::vector<Ball>& balls);

}  // namespace psm
