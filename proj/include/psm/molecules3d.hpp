#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psm/layers.hpp"

namespace psm {

/// Element symbol -> van der Waals radius in Angstrom.
class RadiiTable {
 public:
  /// Built-in UFF radii (half the UFF x_i distances).
  static RadiiTable uff();
  /// Lines `Element radius`; `#` starts a comment.
  static RadiiTable read(std::istream& in);

  std::optional<double> lookup(const std::string& element) const;
  void set(const std::string& element, double radius);
  const std::map<std::string, double>& entries() const { return radii_; }

 private:
  std::map<std::string, double> radii_;
};

/// "cl" / "CL" -> "Cl".
std::string normalize_element(std::string_view symbol);

struct Atom {
  std::string element;
  Vec3 position;
  std::optional<double> radius_override;
  std::size_t line = 0;
};

/// Extended XYZ: optional atom-count line, optional comment line, then
/// `Element x y z [radius]` per atom. Atoms without a radius must be in `table`.
std::vector<Atom> parse_molecule(std::string_view text, const RadiiTable& table = RadiiTable::uff());

enum class RadiiKind { VdwScaled, Sas };

RadiiKind parse_radii_kind(const std::string& text);

struct RadiiConvention {
  RadiiKind kind = RadiiKind::VdwScaled;
  double scale = 1.1;
  double probe = 1.4;
  RadiiTable table = RadiiTable::uff();

  void validate() const;
  double radius(const Atom& atom) const;
};

/// vdw_scaled: r = scale * r_vdw. sas: r = r_vdw + probe (unscaled).
std::vector<Ball> build_balls(const std::vector<Atom>& atoms, const RadiiConvention& conv);

struct StatsParams {
  std::size_t n_dirs = kDefaultDirections;
  double exposure_eps = -1.0;  // negative: 2 / n_dirs
};

struct MoleculeStats {
  std::size_t n_atoms = 0;
  int n_layers = 0;
  double avg_neighbors = 0.0;
  double avg_max_intersection_degree = 0.0;
  double avg_overlap = 0.0;
  std::vector<int> layer_of;
};

/// Throws Disconnected when the ball union is not connected and InvalidInput
/// for fewer than two balls.
MoleculeStats molecule_stats(const std::vector<Ball>& balls, const StatsParams& params = {});

}  // namespace psm
