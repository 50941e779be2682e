#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fvproj/analysis.hpp"
#include "fvproj/mesh.hpp"
#include "fvproj/output.hpp"
#include "fvproj/run_config.hpp"
#include "fvproj/scheme.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

struct Common {
  std::string mesh;
  std::string config;
  std::optional<int> level;
  std::uint64_t seed = 1;
  std::string out;
  bool allow_degenerate = false;
  std::optional<double> solver_rtol;
  std::vector<std::string> overrides;
  int samples = 32;
};

fvproj::Mesh load(const std::string& path) {
  const auto ext = fs::path(path).extension();
  const auto format = (ext == ".node" || ext == ".ele") ? fvproj::MeshFormat::node_ele : fvproj::MeshFormat::single_file;
  return fvproj::load_mesh(path, format);
}

/// Mesh from --mesh, else from the acute family at --level (default 0).
fvproj::Mesh resolve_mesh(const Common& c, int default_level = 0) {
  if (!c.mesh.empty()) {
    return load(c.mesh);
  }
  return fvproj::acute_square_mesh(c.level.value_or(default_level));
}

bool require_admissible(const fvproj::Mesh& mesh, const Common& c) {
  const auto q = fvproj::validate_mesh(mesh);
  if (!q.admissible && !c.allow_degenerate) {
    std::cerr << "error: mesh is not admissible (max angle " << q.max_angle * 180.0 / std::numbers::pi
              << " deg); use --allow-degenerate to continue\n";
    return false;
  }
  if (!(q.min_distance_ratio > 0.0)) {
    std::cerr << "error: a circumcenter distance vanishes; the two-point Laplacian is undefined on this mesh\n";
    return false;
  }
  return true;
}

std::vector<int> level_window(int finest) {
  std::vector<int> levels;
  for (int l = std::max(0, finest - 2); l <= finest; ++l) levels.push_back(l);
  return levels;
}

void emit(const fvproj::VerificationReport& rep, const Common& c, const std::string& csv_name) {
  rep.print(std::cout);
  if (!c.out.empty()) {
    rep.write_csv(fs::path(c.out) / csv_name);
  }
}

int cmd_run(const Common& c) {
  fvproj::RunConfig cfg;
  if (!c.config.empty()) {
    cfg = fvproj::load_run_config(c.config, cfg);
  }
  for (const auto& o : c.overrides) fvproj::apply_setting(cfg, o);
  if (!c.mesh.empty()) cfg.mesh = c.mesh;
  if (c.level) cfg.mesh_level = *c.level;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.solver_rtol) cfg.momentum_solver.rtol = cfg.pressure_solver.rtol = *c.solver_rtol;
  if (c.allow_degenerate) cfg.allow_degenerate = true;
  cfg.validate();

  const fvproj::Mesh mesh = cfg.mesh.empty() ? fvproj::acute_square_mesh(cfg.mesh_level) : load(cfg.mesh);
  Common mc = c;
  mc.allow_degenerate = cfg.allow_degenerate;
  if (!require_admissible(mesh, mc)) {
    return kCheckFailed;
  }
  fvproj::SnapshotCallback snap;
  if (!cfg.output_dir.empty() && cfg.cadence > 0) {
    snap = [&](const fvproj::SchemeState& s) { fvproj::write_snapshot(s, cfg.output_dir); };
  }
  const fvproj::Trajectory traj = fvproj::run(mesh, cfg, snap);
  if (!cfg.output_dir.empty()) {
    fvproj::write_monitors_csv(traj, fs::path(cfg.output_dir) / "monitors.csv");
  }
  const auto& last = traj.steps.back();
  std::cout << "problem " << cfg.problem << ", " << mesh.num_triangles() << " triangles, k = " << cfg.k
            << ", N = " << cfg.steps << ", Re = " << cfg.reynolds << '\n';
  std::cout << "final: |u| = " << last.u_norm << ", |p| = " << last.p_norm << ", energy = " << last.energy << '\n';
  fvproj::MonitorOptions mo;
  mo.solver_rtol = cfg.pressure_solver.rtol;
  const auto rep = fvproj::stability_monitors(traj, cfg.mesh_level, mo);
  rep.print(std::cout);
  if (!cfg.output_dir.empty()) {
    rep.write_csv(fs::path(cfg.output_dir) / "run_checks.csv");
  }
  return rep.all_passed() ? kOk : kCheckFailed;
}

int cmd_verify(const Common& c) {
  fvproj::VerificationReport rep;
  if (!c.mesh.empty()) {
    const fvproj::Mesh mesh = load(c.mesh);
    if (!require_admissible(mesh, c)) {
      return kCheckFailed;
    }
    fvproj::CheckOptions co;
    co.seed = c.seed;
    co.samples = c.samples;
    rep.append(fvproj::check_identities(mesh, co));
    rep.append(fvproj::check_convection(mesh, co).report);
    const auto is = fvproj::estimate_infsup(mesh);
    rep.add("infsup_constant", 0, is.beta, 0.01, is.beta > 0.01);
  } else {
    fvproj::VerifyOptions vo;
    vo.levels = level_window(c.level.value_or(2));
    vo.seed = c.seed;
    vo.samples = c.samples;
    rep = fvproj::verify_all(vo);
  }
  emit(rep, c, "verify.csv");
  return rep.all_passed() ? kOk : kCheckFailed;
}

int cmd_infsup(const Common& c) {
  fvproj::VerificationReport rep;
  if (!c.mesh.empty()) {
    const fvproj::Mesh mesh = load(c.mesh);
    if (!require_admissible(mesh, c)) {
      return kCheckFailed;
    }
    const auto is = fvproj::estimate_infsup(mesh);
    rep.add("infsup_constant", 0, is.beta, 0.01, is.beta > 0.01);
  } else {
    fvproj::ConstantSequence seq;
    seq.name = "infsup_constant";
    seq.drift_tolerance = 1.2;
    for (int l : level_window(c.level.value_or(2))) {
      const auto is = fvproj::estimate_infsup(fvproj::acute_square_mesh(l));
      rep.add("infsup_constant", l, is.beta, 0.01, is.beta > 0.01);
      seq.levels.push_back(l);
      seq.values.push_back(is.beta);
    }
    seq.finalize();
    rep.constants.push_back(seq);
  }
  emit(rep, c, "infsup.csv");
  return rep.all_passed() ? kOk : kCheckFailed;
}

int cmd_rates(const Common& c) {
  const int finest = std::max(c.level.value_or(2), 2);
  const auto levels = level_window(finest);
  const auto r = fvproj::consistency_rate(static_cast<int>(levels.size()), levels.front());
  fvproj::VerificationReport rep;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    rep.add("convection_consistency_error", r.levels[i], r.errors[i], std::numeric_limits<double>::infinity(), true);
  }
  rep.add("convection_consistency_rate", -1, r.rate, 0.8, r.rate >= 0.8);
  emit(rep, c, "rates.csv");
  return rep.all_passed() ? kOk : kCheckFailed;
}

int cmd_mesh_check(const Common& c) {
  const fvproj::Mesh mesh = resolve_mesh(c);
  const auto q = fvproj::validate_mesh(mesh);
  const double deg = 180.0 / std::numbers::pi;
  std::cout << "vertices " << mesh.num_vertices() << ", triangles " << mesh.num_triangles() << ", edges "
            << mesh.num_edges() << " (" << mesh.boundary_edges().size() << " boundary)\n";
  std::cout << "h = " << mesh.h() << '\n';
  std::cout << "min angle = " << q.min_angle * deg << " deg, max angle = " << q.max_angle * deg << " deg\n";
  std::cout << "min transmissibility = " << q.min_transmissibility << ", min d/|sigma| = " << q.min_distance_ratio
            << ", min |sigma|/h = " << q.min_edge_ratio << '\n';
  std::cout << "admissible=" << (q.admissible ? "true" : "false") << '\n';
  return q.admissible || c.allow_degenerate ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite volume projection solver for 2D incompressible Navier-Stokes"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mesh", c.mesh, "Mesh file (single-file format, or .node/.ele)");
    sub->add_option("--level", c.level, "Level of the built-in acute square family")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", c.seed, "Seed for randomized checks");
    sub->add_option("--out", c.out, "Output directory");
    sub->add_flag("--allow-degenerate", c.allow_degenerate, "Accept meshes with right or obtuse angles");
    sub->add_option("--solver-rtol", c.solver_rtol, "Relative tolerance of the linear solvers")
        ->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "Time-dependent simulation");
  add_common(run);
  run->add_option("--config", c.config, "key=value configuration file");
  run->add_option("--set", c.overrides, "Override a configuration key (key=value)");

  auto* verify = app.add_subcommand("verify", "Run every verification check");
  add_common(verify);
  verify->add_option("--samples", c.samples, "Random samples per check")->check(CLI::PositiveNumber);

  auto* infsup = app.add_subcommand("infsup", "Inf-sup constant over refinement levels");
  add_common(infsup);

  auto* rates = app.add_subcommand("rates", "Convection consistency rate");
  add_common(rates);

  auto* mesh_check = app.add_subcommand("mesh-check", "Mesh quality report");
  add_common(mesh_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(c);
    if (*verify) return cmd_verify(c);
    if (*infsup) return cmd_infsup(c);
    if (*rates) return cmd_rates(c);
    if (*mesh_check) return cmd_mesh_check(c);
  } catch (const fvproj::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const fvproj::UnknownProblem& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const fvproj::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kIo;
  } catch (const fvproj::ConfigFileError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fvproj::OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}
