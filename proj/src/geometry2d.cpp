#include "psm/geometry2d.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

namespace psm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TangentIntersection: return "TangentIntersection";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DegenerateArc: return "DegenerateArc";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::MissingSkeletonData: return "MissingSkeletonData";
    case ErrorCode::NoExteriorBoundary: return "NoExteriorBoundary";
    case ErrorCode::InsufficientIterations: return "InsufficientIterations";
    case ErrorCode::NoBoundaryNode: return "NoBoundaryNode";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Error";
}

std::optional<AngularInterval> covered_interval(const Disk& on, const Disk& inside) {
  const Vec2 delta = inside.center - on.center;
  const double d = norm(delta);
  const double r1 = on.radius;
  const double r2 = inside.radius;
  if (d + r1 < r2) return AngularInterval{0.0, kTwoPi};
  if (d >= r1 + r2 || d + r2 <= r1) return std::nullopt;
  const double c = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  const double half = std::acos(c);
  const double dir = std::atan2(delta.y, delta.x);
  return AngularInterval{wrap_angle(dir - half), 2.0 * half};
}

bool Geometry2D::are_neighbors(int a, int b) const {
  const auto& n = neighbors(a);
  return std::binary_search(n.begin(), n.end(), b);
}

Geometry2D build_geometry(std::vector<Disk> disks, double tolerance) {
  if (disks.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "a geometry needs at least two disks");
  }
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be >= 0");
  std::sort(disks.begin(), disks.end(), [](const Disk& a, const Disk& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < disks.size(); ++i) {
    const Disk& d = disks[i];
    if (d.id != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::InvalidInput, "disk ids must be unique and contiguous from 1");
    }
    if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y) || !std::isfinite(d.radius) ||
        d.radius <= 0.0) {
      throw Error(ErrorCode::InvalidInput,
                  "disk " + std::to_string(d.id) + " needs a finite center and positive radius");
    }
  }

  const std::size_t n = disks.size();
  std::vector<std::vector<int>> neighbors(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const Disk& a = disks[i];
      const Disk& b = disks[k];
      const double d = dist(a.center, b.center);
      const double eps = tolerance * std::max(a.radius, b.radius);
      const double penetration = a.radius + b.radius - d;
      const auto pair = "disks " + std::to_string(a.id) + " and " + std::to_string(b.id);
      if (std::abs(penetration) <= eps) {
        throw Error(ErrorCode::TangentIntersection, pair + " touch at a single point");
      }
      if (penetration < 0.0) continue;
      if (std::abs(d - std::abs(a.radius - b.radius)) <= eps) {
        throw Error(ErrorCode::TangentIntersection, pair + " are internally tangent");
      }
      neighbors[i].push_back(b.id);
      neighbors[k].push_back(a.id);
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::NoIntersection, "no pair of disks intersects");
  for (auto& list : neighbors) std::sort(list.begin(), list.end());

  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(1);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : neighbors[static_cast<std::size_t>(v - 1)]) {
      if (!seen[static_cast<std::size_t>(w - 1)]) {
        seen[static_cast<std::size_t>(w - 1)] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::Disconnected, "adjacency graph has " + std::to_string(n - reached) +
                                             " unreachable disks");
  }

  Geometry2D geom;
  geom.disks_ = std::move(disks);
  geom.neighbors_ = std::move(neighbors);
  geom.tolerance_ = tolerance;
  return geom;
}

bool ArcPiece::covered_by(int k) const { return std::binary_search(label.begin(), label.end(), k); }

std::vector<ArcPiece> partition_boundary(const Geometry2D& geom, int j) {
  const Disk& own = geom.disk(j);
  struct Cover {
    int id;
    AngularInterval interval;
  };
  std::vector<Cover> covers;
  std::vector<double> breaks;
  for (int k : geom.neighbors(j)) {
    if (auto iv = covered_interval(own, geom.disk(k))) {
      covers.push_back({k, *iv});
      if (!iv->full()) {
        breaks.push_back(iv->start);
        breaks.push_back(wrap_angle(iv->end()));
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());

  std::vector<AngularInterval> spans;
  if (breaks.empty()) {
    spans.push_back({0.0, kTwoPi});
  } else {
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      const double lo = breaks[i];
      const double hi = i + 1 < breaks.size() ? breaks[i + 1] : breaks.front() + kTwoPi;
      spans.push_back({lo, hi - lo});
    }
  }

  std::vector<ArcPiece> pieces;
  pieces.reserve(spans.size());
  for (const auto& span : spans) {
    if (span.width < geom.tolerance()) {
      throw Error(ErrorCode::DegenerateArc, "circle " + std::to_string(j) +
                                                " has a piece of angular width " +
                                                std::to_string(span.width));
    }
    ArcPiece piece{j, span, {}};
    const double mid = wrap_angle(span.start + 0.5 * span.width);
    for (const auto& c : covers) {
      if (c.interval.contains(mid)) piece.label.push_back(c.id);
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::size_t Skeleton::sample_count() const {
  std::size_t total = 0;
  for (const auto& arc : arcs) total += arc.samples.size();
  return total;
}

int Skeleton::arc_index(int neighbor) const {
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].neighbor == neighbor) return static_cast<int>(a);
  }
  return -1;
}

std::vector<Skeleton> build_skeletons(const Geometry2D& geom, std::size_t samples_per_arc) {
  if (samples_per_arc < 3) {
    throw Error(ErrorCode::InvalidInput, "need at least 3 samples per skeleton arc");
  }
  std::vector<Skeleton> skeletons;
  skeletons.reserve(geom.size());
  for (const Disk& own : geom.disks()) {
    Skeleton sk{own.id, {}};
    for (int k : geom.neighbors(own.id)) {
      const Disk& other = geom.disk(k);
      auto iv = covered_interval(other, own);
      if (!iv) continue;
      SkeletonArc arc{k, *iv, {}};
      arc.samples.reserve(samples_per_arc);
      const double step = iv->full() ? iv->width / static_cast<double>(samples_per_arc)
                                     : iv->width / static_cast<double>(samples_per_arc - 1);
      for (std::size_t s = 0; s < samples_per_arc; ++s) {
        const double angle = iv->start + step * static_cast<double>(s);
        const Vec2 p = polar(other.center, other.radius, angle);
        const bool endpoint = !iv->full() && (s == 0 || s + 1 == samples_per_arc);
        const bool on_boundary =
            endpoint &&
            std::abs(dist(p, own.center) - own.radius) <=
                std::max(geom.tolerance(), 1e-12) * own.radius;
        arc.samples.push_back({angle, p, on_boundary});
      }
      sk.arcs.push_back(std::move(arc));
    }
    skeletons.push_back(std::move(sk));
  }
  return skeletons;
}

double union_measure(const std::vector<AngularInterval>& intervals) {
  std::vector<std::pair<double, double>> segs;
  for (const auto& iv : intervals) {
    if (iv.full()) return kTwoPi;
    const double lo = wrap_angle(iv.start);
    const double hi = lo + iv.width;
    if (hi <= kTwoPi) {
      segs.emplace_back(lo, hi);
    } else {
      segs.emplace_back(lo, kTwoPi);
      segs.emplace_back(0.0, hi - kTwoPi);
    }
  }
  std::sort(segs.begin(), segs.end());
  double total = 0.0;
  double cur_lo = 0.0;
  double cur_hi = -1.0;
  for (const auto& [lo, hi] : segs) {
    if (lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return std::min(total, kTwoPi);
}

double exposure_fraction_2d(const Geometry2D& geom, int j, const ActiveSet& active) {
  const Disk& own = geom.disk(j);
  std::vector<AngularInterval> covered;
  for (int k : geom.neighbors(j)) {
    if (!active.at(static_cast<std::size_t>(k - 1))) continue;
    if (auto iv = covered_interval(own, geom.disk(k))) covered.push_back(*iv);
  }
  const double frac = 1.0 - union_measure(covered) / kTwoPi;
  return std::clamp(frac, 0.0, 1.0);
}

std::vector<Disk> read_disks(std::istream& in) {
  std::vector<Disk> disks;
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
        if (tag != "disks2d" || version != "v1") {
          throw Error(ErrorCode::ParseError,
                      "line " + std::to_string(lineno) + ": expected header '# disks2d v1'");
        }
        header = true;
      }
      continue;
    }
    if (!header) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) +
                                             ": missing '# disks2d v1' header");
    }
    std::istringstream ls(line);
    Disk d;
    std::string extra;
    if (!(ls >> d.id >> d.center.x >> d.center.y >> d.radius) || (ls >> extra)) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected 'id cx cy r'");
    }
    disks.push_back(d);
  }
  if (!header) throw Error(ErrorCode::ParseError, "missing '# disks2d v1' header");
  return disks;
}

void write_disks(std::ostream& out, const std::vector<Disk>& disks) {
  out << "# disks2d v1\n";
  char buf[160];
  for (const Disk& d : disks) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", d.id, d.center.x, d.center.y,
                  d.radius);
    out << buf;
  }
}

}  // namespace psm
