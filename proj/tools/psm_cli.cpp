// psm: command-line front end to the library. Every subcommand writes its
// artifact atomically and prints a one-line summary on stdout.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "psm/generators.hpp"
#include "psm/molecules3d.hpp"
#include "psm/schwarz.hpp"

namespace fs = std::filesystem;
using namespace psm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string log_level = "info";
};

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partial file.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Geometry2D load_geometry(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  return build_geometry(read_disks(in));
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_validation(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidSpec:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownElement:
    case ErrorCode::TangentIntersection:
    case ErrorCode::Disconnected:
    case ErrorCode::NoIntersection:
    case ErrorCode::DegenerateArc:
      return true;
    default:
      return false;
  }
}

// gen ------------------------------------------------------------------------
struct GenArgs {
  std::string family = "hex";
  int size = 2;
  double radius = 1.0;
  double spacing = 0.0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const GeneratorSpec spec{parse_family(a.family), a.size, a.radius, a.spacing};
  const auto disks = generate_disks(spec);
  build_geometry(disks);
  write_atomically(a.out, [&](std::ostream& os) { write_disks(os, disks); });
  spdlog::info("wrote {} disks to {}", disks.size(), a.out);
  std::printf("disks=%zu\n", disks.size());
  return kExitOk;
}

// run ------------------------------------------------------------------------
struct RunArgs {
  std::string geometry;
  int iterations = 100;
  std::string pou = "continuous";
  std::string mode = "error";
  std::string g = "zero";
  std::size_t samples = kDefaultSamplesPerArc;
  int quad_nodes = QuadratureConfig{}.nodes_per_piece;
  double stop_tol = 0.0;
  int window = 20;
  std::string out;
};

int cmd_run(const RunArgs& a, const Globals& glob) {
  OperatorConfig cfg;
  cfg.samples_per_arc = a.samples;
  cfg.threads = glob.threads;
  cfg.quad.nodes_per_piece = a.quad_nodes;
  cfg.quad.validate();
  if (a.iterations < 1) throw Error(ErrorCode::InvalidInput, "--iterations must be >= 1");
  const PoUKind kind = parse_pou_kind(a.pou);
  const IterationOperator op(load_geometry(a.geometry), kind, cfg);
  spdlog::info("{} subdomains, n_max={}, {} skeleton samples", op.geometry().size(), op.layers().n_max,
               SkeletonField::constant(op.skeletons(), 0.0).sample_count());

  std::vector<double> series;  // series[n] for n = 0..iterations
  int first = -1;
  if (a.mode == "error") {
    const RunReport rep = run_error_recursion(op, a.iterations);
    series = rep.norms;
    first = rep.first_contraction_index;
  } else if (a.mode == "solve") {
    const auto [u, rep] = solve_psm(op, BoundaryData::parse(a.g), op.constant(0.0), a.iterations, a.stop_tol);
    series.push_back(std::numeric_limits<double>::quiet_NaN());
    series.insert(series.end(), rep.increments.begin(), rep.increments.end());
  } else {
    throw Error(ErrorCode::InvalidInput, "--mode must be error or solve");
  }

  write_atomically(a.out, [&](std::ostream& os) {
    os << "iter,norm_inf,ratio,first_contraction_flag\n";
    for (std::size_t n = 1; n < series.size(); ++n) {
      const double ratio = series[n - 1] > 0.0 ? series[n] / series[n - 1] : std::nan("");
      os << n << ',' << num(series[n]) << ',' << num(ratio) << ','
         << (static_cast<int>(n) == first ? 1 : 0) << '\n';
    }
  });

  double factor = std::nan("");
  std::vector<double> fit(series.begin() + (a.mode == "solve" ? 1 : 0), series.end());
  try {
    factor = asymptotic_factor(fit, a.window);
  } catch (const Error& e) {
    spdlog::warn("{}", e.what());
  }
  if (a.mode == "error") {
    std::printf("first_contraction=%d asymptotic_factor=%s\n", first, num(factor).c_str());
  } else {
    std::printf("iterations=%zu final_increment=%s asymptotic_factor=%s\n", series.size() - 1,
                num(series.back()).c_str(), num(factor).c_str());
  }
  return kExitOk;
}

// layers ---------------------------------------------------------------------
struct LayersArgs {
  std::string geometry;
  bool three_d = false;
  std::size_t n_dirs = kDefaultDirections;
  std::string out;
};

int cmd_layers(const LayersArgs& a) {
  LayerAssignment layers;
  if (a.three_d) {
    std::ifstream in(a.geometry);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + a.geometry);
    layers = peel_layers_3d(read_balls(in), a.n_dirs);
  } else {
    layers = peel_layers_2d(load_geometry(a.geometry));
  }
  write_atomically(a.out, [&](std::ostream& os) {
    os << "id,layer\n";
    for (std::size_t i = 0; i < layers.layer_of.size(); ++i) os << i + 1 << ',' << layers.layer_of[i] << '\n';
  });
  std::printf("n_max=%d\n", layers.n_max);
  return kExitOk;
}

// stats ----------------------------------------------------------------------
struct StatsArgs {
  std::string molecule;
  std::string radii = "vdw";
  double scale = 1.1;
  double probe = 1.4;
  std::string table;
  std::size_t n_dirs = kDefaultDirections;
  std::string out;
};

int cmd_stats(const StatsArgs& a) {
  RadiiConvention conv;
  conv.kind = parse_radii_kind(a.radii);
  conv.scale = a.scale;
  conv.probe = a.probe;
  if (!a.table.empty()) {
    std::ifstream in(a.table);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + a.table);
    conv.table = RadiiTable::read(in);
  }
  conv.validate();
  const auto atoms = parse_molecule(slurp(a.molecule), conv.table);
  const auto balls = build_balls(atoms, conv);
  StatsParams params;
  params.n_dirs = a.n_dirs;
  const MoleculeStats st = molecule_stats(balls, params);
  write_atomically(a.out, [&](std::ostream& os) {
    os << "id,element,x,y,z,radius,layer\n";
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      os << i + 1 << ',' << atoms[i].element << ',' << num(balls[i].center.x) << ',' << num(balls[i].center.y)
         << ',' << num(balls[i].center.z) << ',' << num(balls[i].radius) << ',' << st.layer_of[i] << '\n';
    }
  });
  std::printf("n_atoms=%zu n_layers=%d avg_neighbors=%s avg_max_intersection_degree=%s avg_overlap=%s\n",
              st.n_atoms, st.n_layers, num(st.avg_neighbors).c_str(),
              num(st.avg_max_intersection_degree).c_str(), num(st.avg_overlap).c_str());
  return kExitOk;
}

// verify ---------------------------------------------------------------------
struct VerifyArgs {
  int quad_nodes = QuadratureConfig{}.nodes_per_piece;
  double min_distance = QuadratureConfig{}.min_distance;
  std::string pou = "continuous";
};

int cmd_verify(const VerifyArgs& a, const Globals& glob) {
  QuadratureConfig quad;
  quad.nodes_per_piece = a.quad_nodes;
  quad.min_distance = a.min_distance;
  quad.validate();
  const PoUKind kind = parse_pou_kind(a.pou);
  int passed = 0, failed = 0;
  auto check = [&](const char* name, bool ok, const std::string& detail) {
    (ok ? passed : failed) += 1;
    std::printf("check %-22s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
  };
  auto guarded = [&](const char* name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(name, false, e.what());
    }
  };

  guarded("pou_sum", [&] {
    double worst = 0.0;
    bool ok = true;
    const std::vector<Geometry2D> geoms{hex_layers(3), quad_layers(2), tri_lattice(4)};
    for (const Geometry2D& g : geoms) {
      const PoUReport rep = verify_pou(PoUSpec(g, kind), g, 200);
      worst = std::max(worst, rep.max_sum_error);
      ok = ok && rep.ok(1e-12);
    }
    check("pou_sum", ok, "max |sum-1| = " + num(worst) + " (" + a.pou + ")");
  });

  guarded("harmonic_oracle", [&] {
    const Disk d{1, {0.25, -0.5}, 1.5};
    double worst = 0.0;
    for (int m = 0; m <= 8; ++m) {
      for (bool imag : {false, true}) {
        const auto trace = BoundaryTrace::from_function(
            1, [m, imag](double t) { return imag ? std::sin(m * t) : std::cos(m * t); });
        for (int i = 0; i <= 9; ++i) {
          for (int s = 0; s < 16; ++s) {
            const Vec2 off = polar({0, 0}, 0.9 * d.radius * i / 9, kTwoPi * (s + 0.3 * i) / 16);
            const std::complex<double> p = std::pow(std::complex<double>(off.x, off.y) / d.radius, m);
            const double u = poisson_eval(d, trace, d.center + off, quad);
            worst = std::max(worst, std::abs(u - (imag ? p.imag() : p.real())));
          }
        }
      }
    }
    check("harmonic_oracle", worst <= kQuadratureTol, "max error = " + num(worst));
  });

  OperatorConfig cfg;
  cfg.quad = quad;
  cfg.threads = glob.threads;
  cfg.samples_per_arc = 65;

  guarded("monotonicity", [&] {
    const IterationOperator op(hex_layers(2), kind, cfg);
    const MonotonicityReport m = monotonicity_check(op, 10, glob.seed);
    check("monotonicity", m.max_violation <= 1e-8 && m.max_expansion <= 1e-8,
          "max(Tv-Tu) = " + num(m.max_violation) + ", max(|Tv|-|v|) = " + num(m.max_expansion));
  });

  guarded("first_contraction", [&] {
    const IterationOperator op(hex_layers(2), kind, cfg);
    const RunReport rep = run_error_recursion(op, 4);
    check("first_contraction", rep.first_contraction_index == op.layers().n_max + 1,
          "index " + std::to_string(rep.first_contraction_index) + ", n_max " +
              std::to_string(op.layers().n_max));
  });

  guarded("layers", [&] {
    const bool ok = peel_layers_2d(chain(5)).n_max == 1 && peel_layers_2d(hex_layers(3)).n_max == 3 &&
                    peel_layers_2d(quad_layers(2)).n_max == 2;
    check("layers", ok, "chain 1, hex 3, quad 2");
  });

  std::printf("verify: passed=%d failed=%d\n", passed, failed);
  return failed == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel Schwarz iteration on unions of disks, plus layer and molecule tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals glob;
  app.add_option("--seed", glob.seed, "Seed for randomized checks");
  app.add_option("--threads", glob.threads, "Worker threads for the subdomain map (0 = all cores)");
  app.add_option("--log-level", glob.log_level, "Log verbosity on stderr")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a disk geometry");
  g->add_option("--family", gen.family, "chain | hex | quad | tri")->required();
  g->add_option("--size", gen.size, "Disk count (chain), layers (hex, quad) or side (tri)")->required();
  g->add_option("--radius", gen.radius, "Disk radius");
  g->add_option("--spacing", gen.spacing, "Center spacing; 0 picks the family default");
  g->add_option("--out", gen.out, "Output disk file")->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "Iterate the Schwarz method");
  r->add_option("--geometry", run.geometry, "Disk file")->required()->check(CLI::ExistingFile);
  r->add_option("--iterations", run.iterations, "Number of sweeps");
  r->add_option("--pou", run.pou, "Partition of unity")->check(CLI::IsMember({"continuous", "discontinuous"}));
  r->add_option("--mode", run.mode, "error: iterate from ones with zero data; solve: iterate with --g")
      ->check(CLI::IsMember({"error", "solve"}));
  r->add_option("--g", run.g, "Exterior data for solve mode: zero | const:C | linear-x | linear-y");
  r->add_option("--samples", run.samples, "Samples per skeleton arc");
  r->add_option("--quad-nodes", run.quad_nodes, "Gauss-Legendre nodes per panel");
  r->add_option("--stop-tol", run.stop_tol, "Solve mode: stop when the increment drops below this");
  r->add_option("--window", run.window, "Iterations used for the asymptotic factor");
  r->add_option("--out", run.out, "Output CSV")->required();

  LayersArgs lay;
  auto* l = app.add_subcommand("layers", "Peel a geometry into layers");
  l->add_option("--geometry", lay.geometry, "Disk file, or ball file with --3d")->required()->check(CLI::ExistingFile);
  l->add_flag("--3d", lay.three_d, "Read a balls3d file");
  l->add_option("--n-dirs", lay.n_dirs, "Sphere directions for 3D exposure");
  l->add_option("--out", lay.out, "Output CSV")->required();

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "Geometry statistics of a molecule");
  s->add_option("--molecule", st.molecule, "Extended XYZ file")->required()->check(CLI::ExistingFile);
  s->add_option("--radii", st.radii, "vdw (scaled) or sas")->check(CLI::IsMember({"vdw", "vdw_scaled", "sas"}));
  s->add_option("--scale", st.scale, "Scale factor for vdw radii");
  s->add_option("--probe", st.probe, "Probe radius for sas");
  s->add_option("--radii-table", st.table, "Element radius table")->check(CLI::ExistingFile);
  s->add_option("--n-dirs", st.n_dirs, "Sphere directions for exposure");
  s->add_option("--out", st.out, "Output CSV")->required();

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the built-in property checks");
  v->add_option("--quad-nodes", ver.quad_nodes, "Gauss-Legendre nodes per panel");
  v->add_option("--min-distance", ver.min_distance, "Relative distance below which evaluation is refused");
  v->add_option("--pou", ver.pou, "Partition of unity")->check(CLI::IsMember({"continuous", "discontinuous"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  auto logger = spdlog::stderr_color_mt("psm");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_level(glob.log_level == "quiet"   ? spdlog::level::off
                    : glob.log_level == "debug" ? spdlog::level::debug
                                                : spdlog::level::info);
  spdlog::debug("seed={} threads={}", glob.seed, glob.threads);

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run, glob);
    if (*l) return cmd_layers(lay);
    if (*s) return cmd_stats(st);
    if (*v) return cmd_verify(ver, glob);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_validation(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}
