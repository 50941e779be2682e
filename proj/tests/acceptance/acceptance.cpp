// Acceptance run: one pass/fail line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fvproj/analysis.hpp"
#include "fvproj/operators.hpp"
#include "fvproj/scheme.hpp"
#include "support/helpers.hpp"

using namespace fvproj;
using testing_support::random_values;
using testing_support::to_mesh;
using testing_support::to_oracle;

namespace {

constexpr std::uint64_t kSeed = 20240607;
const std::vector<int> kLevels{0, 1, 2};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<Mesh>& family() {
  static const std::vector<Mesh> meshes = [] {
    std::vector<Mesh> m;
    for (int l : kLevels) m.push_back(acute_square_mesh(l));
    return m;
  }();
  return meshes;
}

Verdict adjointness() {
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  for (const Mesh& m : family()) {
    for (int r = 0; r < 32; ++r) {
      const VectorP0 v(m, random_values(rng, 2 * m.num_triangles()));
      const ScalarP1NC q(m, random_values(rng, m.num_edges()));
      const double res = std::abs(l2_inner(v, gradient(q)) + l2_inner(q, divergence(v)));
      worst = std::max(worst, res / (l2_norm(v) * norm_1h(q)));
    }
  }
  return {worst <= 1e-11, "max relative residual " + fmt("%.3g", worst) + " (<= 1e-11)"};
}

Verdict coercivity() {
  std::mt19937_64 rng(kSeed + 1);
  double worst = 0.0;
  for (const Mesh& m : family()) {
    for (int r = 0; r < 32; ++r) {
      const VectorP0 v(m, random_values(rng, 2 * m.num_triangles()));
      const double h2 = std::pow(h_norm(v), 2);
      worst = std::max(worst, std::abs(-l2_inner(laplacian_p0(v), v) - h2) / h2);
    }
  }
  return {worst <= 1e-11, "max relative residual " + fmt("%.3g", worst) + " (<= 1e-11)"};
}

Verdict positivity() {
  std::mt19937_64 rng(kSeed + 2);
  double worst = std::numeric_limits<double>::infinity();
  for (const Mesh& m : family()) {
    const OperatorSet ops(m);
    for (int r = 0; r < 32; ++r) {
      const P0CapRT0 u = random_solenoidal(ops, rng());
      const VectorP0 v(m, random_values(rng, 2 * m.num_triangles()));
      const double hv = h_norm(v);
      worst = std::min(worst, trilinear_form(u, v, v) / (l2_norm(u.field()) * hv * hv));
    }
  }
  return {worst >= -1e-11, "min b_h(u,v,v)/(|u| ||v||_h^2) = " + fmt("%.3g", worst) + " (>= -1e-11)"};
}

struct RunOutcome {
  Trajectory traj;
  RunConfig cfg;
  std::size_t triangles = 0;
  double seconds = 0.0;
};

const RunOutcome& reference_run() {
  static const RunOutcome out = [] {
    RunOutcome o;
    o.cfg.mesh_level = 2;
    o.cfg.steps = 200;
    o.cfg.reynolds = 100.0;
    const Mesh& m = family()[2];
    o.triangles = m.num_triangles();
    const auto t0 = std::chrono::steady_clock::now();
    o.traj = run(m, o.cfg);
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
  }();
  return out;
}

Verdict incompressibility() {
  const RunOutcome& r = reference_run();
  const double rtol = r.cfg.pressure_solver.rtol;
  double worst = 0.0;
  for (const auto& s : r.traj.steps) {
    worst = std::max(worst, s.u_norm > 0.0 ? s.div_residual / (rtol * s.u_norm) : 0.0);
  }
  const bool fast = r.seconds < 60.0;
  return {worst <= 10.0 && fast && r.traj.steps.size() == 200,
          "max |div_h u|/(rtol |u|) = " + fmt("%.3g", worst) + " (<= 10) over " +
              std::to_string(r.traj.steps.size()) + " steps on " + std::to_string(r.triangles) +
              " triangles, run " + fmt("%.1f", r.seconds) + " s (< 60 s)"};
}

Verdict projection_identities() {
  const RunOutcome& r = reference_run();
  double orth = 0.0;
  double pyth = 0.0;
  for (const auto& s : r.traj.steps) {
    orth = std::max(orth, s.orthogonality);
    pyth = std::max(pyth, s.pythagoras);
  }
  return {orth <= 1e-11 && pyth <= 1e-11,
          "orthogonality " + fmt("%.3g", orth) + ", Pythagoras " + fmt("%.3g", pyth) + " (<= 1e-11)"};
}

Verdict energy_stability() {
  const RunOutcome& r = reference_run();
  MonitorOptions mo;
  mo.solver_rtol = r.cfg.pressure_solver.rtol;
  const auto rep = stability_monitors(r.traj, 2, mo);
  std::string detail;
  bool pass = true;
  for (const char* name : {"energy_bounded", "increments_bounded", "pressure_sum_bounded"}) {
    for (const auto& c : rep.checks) {
      if (c.name == name) {
        pass = pass && c.pass;
        detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt("%.3g", c.value);
      }
    }
  }
  return {pass, detail + " (growth <= 10)"};
}

Verdict infsup() {
  bool pass = true;
  std::vector<double> betas;
  std::string detail = "beta";
  for (int l : kLevels) {
    const auto path = std::filesystem::path(FVPROJ_DATA_DIR) / "meshes" / ("square_acute_L" + std::to_string(l) + ".mesh");
    const Mesh m = load_mesh(path);
    pass = pass && validate_mesh(m).admissible;
    const double b = estimate_infsup(m).beta;
    betas.push_back(b);
    pass = pass && b > 0.01;
    detail += " " + fmt("%.4f", b);
  }
  const auto [lo, hi] = std::minmax_element(betas.begin(), betas.end());
  const double drift = *hi / *lo;
  const auto pair = oracle::rhombus();
  const double oracle_gap = std::abs(estimate_infsup(to_mesh(pair)).beta - oracle::infsup(pair));
  pass = pass && drift <= 1.2 && oracle_gap <= 1e-6;
  return {pass, detail + " (> 0.01), drift " + fmt("%.3f", drift) + " (<= 1.2), two-triangle oracle gap " +
                    fmt("%.2g", oracle_gap) + " (<= 1e-6)"};
}

Verdict consistency() {
  const RateResult r = consistency_rate(3, 0);
  return {r.rate >= 0.8, "rate " + fmt("%.3f", r.rate) + " (>= 0.8)"};
}

Verdict functional() {
  const auto seqs = poincare_inverse_constants(kLevels);
  bool pass = true;
  std::string detail;
  for (const auto& s : seqs) {
    pass = pass && s.drift < 2.0;
    detail += s.name + " drift " + fmt("%.3f", s.drift) + ", ";
  }
  const Mesh& m = family()[0];
  const auto o = to_oracle(m);
  const FunctionalConstants fc = functional_constants(m);
  const Eigen::MatrixXd mass = o.mass_p0.asDiagonal();
  const Eigen::MatrixXd all = Eigen::MatrixXd::Identity(o.nt, o.nt);
  const Eigen::MatrixXd mp = o.mass_p1nc.asDiagonal();
  const double ref[] = {
      std::sqrt(oracle::max_generalized(mass, o.fv_laplacian, all)),
      m.h() * std::sqrt(oracle::max_generalized(o.fv_laplacian, mass, all)),
      std::sqrt(oracle::max_generalized(mp, o.stiffness, oracle::weighted_mean_free_basis(o.mass_p1nc))),
  };
  const double got[] = {fc.poincare_p0, fc.inverse_p0, fc.poincare_p1nc};
  double gap = 0.0;
  for (int i = 0; i < 3; ++i) gap = std::max(gap, std::abs(got[i] - ref[i]) / ref[i]);
  pass = pass && gap <= 1e-8;
  return {pass, detail + "dense oracle gap " + fmt("%.2g", gap) + " (<= 1e-8)"};
}

Verdict exactness() {
  // Single closed cell: the predictor solves a diagonal 2x2 system.
  const auto eq = oracle::equilateral();
  const Mesh cell = to_mesh(eq);
  RunConfig cfg;
  cfg.k = 0.05;
  cfg.reynolds = 40.0;
  Problem prob;
  prob.initial_velocity = [](const Vec2&) { return Vec2{}; };
  prob.forcing = [](const Vec2&, double) { return Vec2{1.5, -0.5}; };
  ProjectionScheme scheme(cell, cfg, prob);
  const ScalarP1NC p(cell, {0.3, -1.2, 0.8});
  const VectorP0 ut = scheme.momentum_step({P0CapRT0::zero(cell), P0CapRT0::zero(cell), VectorP0(cell), p, 0.0, 1});
  double tau = 0.0;
  for (int e = 0; e < 3; ++e) tau += eq.length[static_cast<std::size_t>(e)] / eq.distance[static_cast<std::size_t>(e)];
  const Eigen::Vector3d pv(p[0], p[1], p[2]);
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity() * (3.0 / (2.0 * cfg.k) + tau / (cfg.reynolds * eq.area[0]));
  const Eigen::Vector2d rhs(1.5 - eq.grad.row(0).dot(pv), -0.5 - eq.grad.row(1).dot(pv));
  const Eigen::Vector2d expected = a.partialPivLu().solve(rhs);
  const double momentum_gap =
      std::max(std::abs(ut.at(0).x - expected(0)), std::abs(ut.at(0).y - expected(1))) / expected.norm();

  // Elementwise midpoint rule against the diagonal P1NC mass.
  CheckOptions co;
  co.seed = kSeed;
  double mass_gap = 0.0;
  for (const auto& c : check_identities(family()[0], co).checks) {
    if (c.name == "p1nc_mass_diagonal") mass_gap = c.value;
  }

  const Mesh right = to_mesh(oracle::unit_right_triangle());
  const ScalarP1NC x = project_p1nc(right, [](const Vec2& pt) { return pt.x; });
  const double quad_gap = std::abs(l2_inner(x, x) - 1.0 / 12.0);

  return {momentum_gap <= 1e-12 && mass_gap <= 1e-13 && quad_gap <= 1e-15,
          "single-cell momentum " + fmt("%.2g", momentum_gap) + " (<= 1e-12), mass diagonality " +
              fmt("%.2g", mass_gap) + " (<= 1e-13), midpoint x^2 " + fmt("%.2g", quad_gap) + " (<= 1e-15)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> check;
  double budget_s;  // 0: no runtime limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gradient/divergence adjointness", adjointness, 5.0},
      {2, "two-point Laplacian coercivity", coercivity, 0.0},
      {3, "upwind positivity", positivity, 0.0},
      {4, "discrete incompressibility", incompressibility, 0.0},
      {5, "projection orthogonality and Pythagoras", projection_identities, 0.0},
      {6, "energy, increment and pressure bounds", energy_stability, 0.0},
      {7, "inf-sup constant", infsup, 120.0},
      {8, "convection consistency rate", consistency, 60.0},
      {9, "Poincare and inverse constants", functional, 0.0},
      {10, "exactness oracles", exactness, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      v.pass = false;
      v.detail += ", over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2d %-42s %s  %s  [%.2f s]\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
