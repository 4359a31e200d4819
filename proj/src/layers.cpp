#include "psm/layers.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace psm {

std::vector<std::vector<int>> LayerAssignment::groups() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_max));
  for (std::size_t i = 0; i < layer_of.size(); ++i) {
    out.at(static_cast<std::size_t>(layer_of[i] - 1)).push_back(static_cast<int>(i) + 1);
  }
  return out;
}

LayerAssignment peel_layers(const ExposureFn& exposure, std::size_t n_vertices, double exposure_eps) {
  LayerAssignment result;
  result.layer_of.assign(n_vertices, 0);
  ActiveSet active(n_vertices, true);
  std::size_t remaining = n_vertices;
  int round = 0;
  while (remaining > 0) {
    ++round;
    std::vector<int> exposed;
    for (std::size_t i = 0; i < n_vertices; ++i) {
      const int id = static_cast<int>(i) + 1;
      if (active[i] && exposure(id, active) > exposure_eps) exposed.push_back(id);
    }
    if (exposed.empty()) {
      throw Error(ErrorCode::NoBoundaryNode, std::to_string(remaining) +
                                                 " vertices remain but none is exposed");
    }
    for (int id : exposed) {
      active[static_cast<std::size_t>(id - 1)] = false;
      result.layer_of[static_cast<std::size_t>(id - 1)] = round;
    }
    remaining -= exposed.size();
  }
  result.n_max = round;
  return result;
}

LayerAssignment peel_layers_2d(const Geometry2D& geom, double exposure_eps) {
  return peel_layers(
      [&geom](int j, const ActiveSet& active) { return exposure_fraction_2d(geom, j, active); },
      geom.size(), exposure_eps);
}

Adjacency adjacency(const Geometry2D& geom) {
  Adjacency adj;
  for (const Disk& d : geom.disks()) adj.push_back(geom.neighbors(d.id));
  return adj;
}

bool has_monotone_neighbors(const LayerAssignment& layers, const Adjacency& adj) {
  for (std::size_t i = 0; i < layers.layer_of.size(); ++i) {
    const int m = layers.layer_of[i];
    if (m < 2) continue;
    const bool ok = std::any_of(adj[i].begin(), adj[i].end(),
                                [&](int k) { return layers.layer(k) == m - 1; });
    if (!ok) return false;
  }
  return true;
}

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    dirs.push_back({rxy * std::cos(phi), rxy * std::sin(phi), z});
  }
  return dirs;
}

Adjacency ball_neighbors(const std::vector<Ball>& balls, double tolerance) {
  Adjacency adj(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t k = i + 1; k < balls.size(); ++k) {
      const double pen =
          balls[i].radius + balls[k].radius - dist(balls[i].center, balls[k].center);
      if (pen > tolerance * std::max(balls[i].radius, balls[k].radius)) {
        adj[i].push_back(balls[k].id);
        adj[k].push_back(balls[i].id);
      }
    }
  }
  return adj;
}

namespace {

inline bool covers(const Ball& k, Vec3 p) { return dist(p, k.center) < k.radius; }

inline Vec3 on_sphere(const Ball& b, Vec3 u) { return b.center + b.radius * u; }

void check_ids(const std::vector<Ball>& balls) {
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (balls[i].id != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::InvalidInput, "ball ids must be contiguous from 1 in order");
    }
  }
}

}  // namespace

double exposure_fraction_3d(const std::vector<Ball>& balls, int j, const ActiveSet& active,
                            std::size_t n_dirs) {
  const Ball& own = balls.at(static_cast<std::size_t>(j - 1));
  std::vector<const Ball*> near;
  for (const Ball& b : balls) {
    if (b.id == j || !active.at(static_cast<std::size_t>(b.id - 1))) continue;
    if (dist(b.center, own.center) < b.radius + own.radius) near.push_back(&b);
  }
  const auto dirs = fibonacci_sphere(n_dirs);
  std::size_t open = 0;
  for (const Vec3& u : dirs) {
    const Vec3 p = on_sphere(own, u);
    if (std::none_of(near.begin(), near.end(), [&](const Ball* b) { return covers(*b, p); })) ++open;
  }
  return static_cast<double>(open) / static_cast<double>(n_dirs);
}

namespace {

// Per-ball cover counts over the direction lattice, all balls active.
std::vector<std::vector<std::uint16_t>> cover_counts(const std::vector<Ball>& balls,
                                                     const Adjacency& adj,
                                                     const std::vector<Vec3>& dirs) {
  std::vector<std::vector<std::uint16_t>> count(balls.size(),
                                                std::vector<std::uint16_t>(dirs.size(), 0));
  for (std::size_t j = 0; j < balls.size(); ++j) {
    for (int k : adj[j]) {
      const Ball& other = balls[static_cast<std::size_t>(k - 1)];
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        if (covers(other, on_sphere(balls[j], dirs[d]))) ++count[j][d];
      }
    }
  }
  return count;
}

}  // namespace

LayerAssignment peel_layers_3d(const std::vector<Ball>& balls, std::size_t n_dirs,
                               double exposure_eps) {
  check_ids(balls);
  if (n_dirs == 0) throw Error(ErrorCode::InvalidInput, "need at least one direction");
  if (exposure_eps < 0.0) exposure_eps = 2.0 / static_cast<double>(n_dirs);
  const auto dirs = fibonacci_sphere(n_dirs);
  const Adjacency adj = ball_neighbors(balls);
  auto count = cover_counts(balls, adj, dirs);
  std::vector<std::size_t> open(balls.size(), 0);
  for (std::size_t j = 0; j < balls.size(); ++j) {
    open[j] = static_cast<std::size_t>(std::count(count[j].begin(), count[j].end(), 0));
  }

  LayerAssignment result;
  result.layer_of.assign(balls.size(), 0);
  ActiveSet active(balls.size(), true);
  std::size_t remaining = balls.size();
  int round = 0;
  while (remaining > 0) {
    ++round;
    std::vector<std::size_t> exposed;
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (active[j] &&
          static_cast<double>(open[j]) / static_cast<double>(n_dirs) > exposure_eps) {
        exposed.push_back(j);
      }
    }
    if (exposed.empty()) {
      throw Error(ErrorCode::NoBoundaryNode, std::to_string(remaining) +
                                                 " balls remain but none is exposed");
    }
    for (std::size_t j : exposed) {
      active[j] = false;
      result.layer_of[j] = round;
    }
    for (std::size_t k : exposed) {
      for (int id : adj[k]) {
        const auto j = static_cast<std::size_t>(id - 1);
        if (!active[j]) continue;
        for (std::size_t d = 0; d < n_dirs; ++d) {
          if (covers(balls[k], on_sphere(balls[j], dirs[d])) && --count[j][d] == 0) ++open[j];
        }
      }
    }
    remaining -= exposed.size();
  }
  result.n_max = round;
  return result;
}

std::vector<int> max_cover_degree(const std::vector<Ball>& balls, std::size_t n_dirs) {
  check_ids(balls);
  const auto dirs = fibonacci_sphere(n_dirs);
  const auto count = cover_counts(balls, ball_neighbors(balls), dirs);
  std::vector<int> out;
  out.reserve(balls.size());
  for (const auto& c : count) out.push_back(c.empty() ? 0 : *std::max_element(c.begin(), c.end()));
  return out;
}

std::vector<Ball> read_balls(std::istream& in) {
  std::vector<Ball> balls;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (!header) {
        std::istringstream hs(line.substr(first + 1));
        std::string tag, version;
        hs >> tag >> version;
        if (tag != "balls3d" || version != "v1") {
          throw Error(ErrorCode::ParseError,
                      "line " + std::to_string(lineno) + ": expected header '# balls3d v1'");
        }
        header = true;
      }
      continue;
    }
    if (!header) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": missing '# balls3d v1' header");
    }
    std::istringstream ls(line);
    Ball b;
    std::string extra;
    if (!(ls >> b.id >> b.center.x >> b.center.y >> b.center.z >> b.radius) || (ls >> extra) ||
        !(b.radius > 0.0)) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected 'id cx cy cz r' with r > 0");
    }
    balls.push_back(b);
  }
  if (!header) throw Error(ErrorCode::ParseError, "missing '# balls3d v1' header");
  std::sort(balls.begin(), balls.end(), [](const Ball& a, const Ball& b) { return a.id < b.id; });
  check_ids(balls);
  return balls;
}

void write_balls(std::ostream& out, const std::vector<Ball>& balls) {
  out << "# balls3d v1\n";
  char buf[200];
  for (const Ball& b : balls) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g %.17g\n", b.id, b.center.x, b.center.y,
                  b.center.z, b.radius);
    out << buf;
  }
}

}  // namespace psm
