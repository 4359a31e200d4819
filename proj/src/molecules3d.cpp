#include "psm/molecules3d.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <queue>
#include <sstream>

namespace psm {

RadiiTable RadiiTable::uff() {
  // Half of the UFF x_i nonbonded distances, Angstrom. Mirrors data/uff_radii.txt.
  RadiiTable t;
  t.radii_ = {{"H", 1.443},   {"C", 1.9255},  {"N", 1.83},    {"O", 1.75},    {"F", 1.682},
              {"Na", 1.4915}, {"Mg", 1.5105}, {"P", 2.0735},  {"S", 2.0175},  {"Cl", 1.9735},
              {"K", 1.906},   {"Ca", 1.6995}, {"Fe", 1.456},  {"Zn", 1.3815}, {"Br", 2.0945},
              {"I", 2.25}};
  return t;
}

RadiiTable RadiiTable::read(std::istream& in) {
  RadiiTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string el;
    if (!(ls >> el)) continue;
    double r = 0.0;
    std::string extra;
    if (!(ls >> r) || (ls >> extra) || !(r > 0.0)) {
      throw Error(ErrorCode::ParseError,
                  "radii table line " + std::to_string(lineno) + ": expected 'Element radius'");
    }
    t.set(el, r);
  }
  return t;
}

std::optional<double> RadiiTable::lookup(const std::string& element) const {
  const auto it = radii_.find(normalize_element(element));
  if (it == radii_.end()) return std::nullopt;
  return it->second;
}

void RadiiTable::set(const std::string& element, double radius) {
  radii_[normalize_element(element)] = radius;
}

std::string normalize_element(std::string_view symbol) {
  std::string out(symbol);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
  }
  return out;
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool is_count_line(const std::vector<std::string>& tok) {
  if (tok.size() != 1) return false;
  return std::all_of(tok[0].begin(), tok[0].end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// An element symbol followed by a number: parse as an atom even if malformed.
bool looks_like_atom(const std::vector<std::string>& tok) {
  if (tok.size() < 2 || tok[0].size() > 3) return false;
  if (!std::all_of(tok[0].begin(), tok[0].end(),
                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
    return false;
  }
  double v = 0.0;
  return to_double(tok[1], v);
}

}  // namespace

std::vector<Atom> parse_molecule(std::string_view text, const RadiiTable& table) {
  std::vector<Atom> atoms;
  std::optional<std::size_t> declared;
  bool header_done = false;
  bool comment_pending = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto tok = split(line);
    if (comment_pending) {
      comment_pending = false;
      continue;
    }
    if (tok.empty() || tok[0][0] == '#') continue;
    if (!header_done) {
      header_done = true;
      if (is_count_line(tok)) {
        declared = std::stoul(tok[0]);
        comment_pending = true;
        continue;
      }
      if (!looks_like_atom(tok)) continue;  // free-form title line
    }
    const std::string where = "line " + std::to_string(lineno);
    if (tok.size() != 4 && tok.size() != 5) {
      throw Error(ErrorCode::ParseError, where + ": expected 'Element x y z [radius]'");
    }
    Atom a;
    a.element = normalize_element(tok[0]);
    a.line = lineno;
    if (!to_double(tok[1], a.position.x) || !to_double(tok[2], a.position.y) ||
        !to_double(tok[3], a.position.z)) {
      throw Error(ErrorCode::ParseError, where + ": coordinates must be finite numbers");
    }
    if (tok.size() == 5) {
      double r = 0.0;
      if (!to_double(tok[4], r) || !(r > 0.0)) {
        throw Error(ErrorCode::ParseError, where + ": radius must be a positive number");
      }
      a.radius_override = r;
    } else if (!table.lookup(a.element)) {
      throw Error(ErrorCode::UnknownElement, where + ": no radius for element '" + a.element + "'");
    }
    atoms.push_back(std::move(a));
  }
  if (declared && *declared != atoms.size()) {
    throw Error(ErrorCode::ParseError, "count line declares " + std::to_string(*declared) +
                                           " atoms but " + std::to_string(atoms.size()) +
                                           " were read");
  }
  return atoms;
}

RadiiKind parse_radii_kind(const std::string& text) {
  if (text == "vdw" || text == "vdw_scaled") return RadiiKind::VdwScaled;
  if (text == "sas") return RadiiKind::Sas;
  throw Error(ErrorCode::InvalidInput, "radii must be vdw or sas, got '" + text + "'");
}

void RadiiConvention::validate() const {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidInput, "scale must be positive");
  if (!(probe >= 0.0)) throw Error(ErrorCode::InvalidInput, "probe must be >= 0");
}

double RadiiConvention::radius(const Atom& atom) const {
  double base = 0.0;
  if (atom.radius_override) {
    base = *atom.radius_override;
  } else if (auto r = table.lookup(atom.element)) {
    base = *r;
  } else {
    throw Error(ErrorCode::UnknownElement, "no radius for element '" + atom.element + "'");
  }
  return kind == RadiiKind::VdwScaled ? scale * base : base + probe;
}

std::vector<Ball> build_balls(const std::vector<Atom>& atoms, const RadiiConvention& conv) {
  conv.validate();
  std::vector<Ball> balls;
  balls.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    balls.push_back({static_cast<int>(i) + 1, atoms[i].position, conv.radius(atoms[i])});
  }
  return balls;
}

MoleculeStats molecule_stats(const std::vector<Ball>& balls, const StatsParams& params) {
  if (balls.size() < 2) throw Error(ErrorCode::InvalidInput, "need at least two balls");
  const Adjacency adj = ball_neighbors(balls);

  std::vector<bool> seen(balls.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      const auto i = static_cast<std::size_t>(w - 1);
      if (!seen[i]) {
        seen[i] = true;
        ++reached;
        frontier.push(i);
      }
    }
  }
  if (reached != balls.size()) {
    throw Error(ErrorCode::Disconnected,
                std::to_string(balls.size() - reached) + " balls are not connected to ball 1");
  }

  MoleculeStats st;
  st.n_atoms = balls.size();
  double neighbors = 0.0;
  double overlap = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    neighbors += static_cast<double>(adj[i].size());
    for (int k : adj[i]) {
      const auto kk = static_cast<std::size_t>(k - 1);
      if (kk <= i) continue;
      overlap += balls[i].radius + balls[kk].radius - dist(balls[i].center, balls[kk].center);
      ++pairs;
    }
  }
  st.avg_neighbors = neighbors / static_cast<double>(balls.size());
  st.avg_overlap = pairs ? overlap / static_cast<double>(pairs) : 0.0;
  const auto degree = max_cover_degree(balls, params.n_dirs);
  double total = 0.0;
  for (int d : degree) total += d;
  st.avg_max_intersection_degree = total / static_cast<double>(balls.size());
  const auto layers = peel_layers_3d(balls, params.n_dirs, params.exposure_eps);
  st.n_layers = layers.n_max;
  st.layer_of = layers.layer_of;
  return st;
}

}  // namespace psm
