#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fvproj/analysis.hpp"
#include "fvproj/operators.hpp"
#include "support/helpers.hpp"

using namespace fvproj;
using testing_support::random_values;
using testing_support::to_eigen;
using testing_support::to_mesh;
using testing_support::to_oracle;

namespace {

double check_value(const VerificationReport& rep, const std::string& name) {
  for (const auto& c : rep.checks) {
    if (c.name == name) return c.value;
  }
  FAIL("missing check " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("identity battery passes on the shipped family") {
  for (int level = 0; level <= 1; ++level) {
    CheckOptions co;
    co.level = level;
    co.seed = 3;
    const auto rep = check_identities(acute_square_mesh(level), co);
    CHECK(rep.checks.size() == 8);
    for (const auto& c : rep.checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("identity residuals vanish for zero fields") {
  const Mesh m = acute_square_mesh(0);
  const VectorP0 v(m);
  const ScalarP1NC q(m);
  CHECK(l2_inner(v, gradient(q)) + l2_inner(q, divergence(v)) == 0.0);
  CHECK(-l2_inner(laplacian_p0(v), v) - h_norm(v) * h_norm(v) == 0.0);
  CHECK(l2_inner(laplacian_p1nc(q), q) == 0.0);
}

TEST_CASE("identity terms on two triangles match dense matrices") {
  const auto o = oracle::rhombus();
  const Mesh m = to_mesh(o);
  std::mt19937_64 rng(71);
  for (int r = 0; r < 5; ++r) {
    const VectorP0 v(m, random_values(rng, 4));
    const ScalarP1NC q(m, random_values(rng, 5));
    const Eigen::VectorXd ve = to_eigen(v.values());
    const Eigen::VectorXd qe = to_eigen(q.values());
    Eigen::VectorXd mv(4);
    mv << o.mass_p0, o.mass_p0;
    const double lhs_dense = ve.dot(mv.asDiagonal() * (o.grad * qe));
    const double rhs_dense = qe.dot(o.mass_p1nc.asDiagonal() * (o.div * ve));
    CHECK(std::abs(l2_inner(v, gradient(q)) - lhs_dense) <= 1e-13 * std::abs(lhs_dense));
    CHECK(std::abs(l2_inner(q, divergence(v)) - rhs_dense) <= 1e-13 * std::abs(rhs_dense));
    CHECK(std::abs(lhs_dense + rhs_dense) <= 1e-13 * std::abs(lhs_dense));

    const double h2 = oracle::h_norm_squared(o, ve);
    CHECK(std::abs(h_norm(v) * h_norm(v) - h2) <= 1e-13 * h2);
    const double g2 = qe.dot(o.stiffness * qe);
    CHECK(std::abs(-l2_inner(laplacian_p1nc(q), q) - g2) <= 1e-13 * g2);
  }
}

TEST_CASE("convection checks") {
  const Mesh m = acute_square_mesh(0);
  CheckOptions co;
  co.seed = 5;
  const auto cc = check_convection(m, co);
  CHECK(cc.report.all_passed());
  CHECK(check_value(cc.report, "upwind_constant_transport") <= 1e-12);
  CHECK(check_value(cc.report, "upwind_positivity") >= -1e-11);

  // The reported constant dominates every sampled ratio.
  const OperatorSet ops(m);
  std::mt19937_64 rng(6);
  for (int r = 0; r < 20; ++r) {
    const P0CapRT0 u = random_solenoidal(ops, rng());
    const VectorP0 v(m, random_values(rng, 2 * m.num_triangles()));
    const VectorP0 w(m, random_values(rng, 2 * m.num_triangles()));
    const double ratio = std::abs(trilinear_form(u, v, w)) / (l2_norm(u.field()) * h_norm(v) * h_norm(w));
    CHECK(ratio <= cc.stability_constant);
  }
}

TEST_CASE("convection constant is stable under refinement") {
  CheckOptions co;
  co.samples = 2;
  co.level = 0;
  const double c0 = check_convection(acute_square_mesh(0), co).stability_constant;
  co.level = 1;
  const double c1 = check_convection(acute_square_mesh(1), co).stability_constant;
  CHECK(std::max(c0, c1) / std::min(c0, c1) <= 2.0);
}

TEST_CASE("inf-sup constant on two triangles matches the dense oracle") {
  const auto o = oracle::rhombus();
  const Mesh m = to_mesh(o);
  const InfSupResult is = estimate_infsup(m);
  const double beta = oracle::infsup(o);
  CHECK(beta > 0.0);
  CHECK(std::abs(is.beta - beta) <= 1e-6);

  // Brute force: no sampled mean-zero pressure beats the infimum, and the best sample is close.
  const int nt = o.nt;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
  h.topLeftCorner(nt, nt) = o.fv_laplacian;
  h.bottomRightCorner(nt, nt) = o.fv_laplacian;
  const auto hl = h.ldlt();
  const Eigen::MatrixXd z = oracle::weighted_mean_free_basis(o.mass_p1nc);
  std::mt19937_64 rng(81);
  std::normal_distribution<double> nd;
  double best = 1e300;
  for (int s = 0; s < 200000; ++s) {
    Eigen::VectorXd y(z.cols());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = nd(rng);
    const Eigen::VectorXd q = z * y;
    const Eigen::VectorXd b = -o.div.transpose() * (o.mass_p1nc.asDiagonal() * q);
    const double sup = std::sqrt(b.dot(hl.solve(b)));
    const double qn = std::sqrt(q.dot(o.mass_p1nc.asDiagonal() * q));
    best = std::min(best, sup / qn);
  }
  CHECK(best >= beta * (1 - 1e-12));
  CHECK(best <= beta * 1.05);
}

TEST_CASE("inf-sup estimators agree on the coarse level") {
  const Mesh m = acute_square_mesh(0);
  const double beta = oracle::infsup(to_oracle(m));
  const InfSupResult dense_path = estimate_infsup(m);
  CHECK_FALSE(dense_path.iterative);
  CHECK(std::abs(dense_path.beta - beta) <= 1e-8 * beta);

  InfSupOptions io;
  io.force_iterative = true;
  io.lanczos_tol = 1e-12;
  const InfSupResult lanczos_path = estimate_infsup(m, io);
  CHECK(lanczos_path.iterative);
  CHECK(std::abs(lanczos_path.beta - beta) <= 1e-6 * beta);

  CHECK(dense_path.gradient_candidate <= dense_path.beta * (1 + 1e-10));
  CHECK(dense_path.gradient_candidate > 0.0);
  const ScalarP1NC q(m, dense_path.pressure_mode);
  CHECK(std::abs(mean(q)) <= 1e-12);
  CHECK(l2_norm(q) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("functional constants match dense generalized eigenproblems") {
  const Mesh m = acute_square_mesh(0);
  const auto o = to_oracle(m);
  const FunctionalConstants fc = functional_constants(m);

  const Eigen::MatrixXd mass = o.mass_p0.asDiagonal();
  const Eigen::MatrixXd all = Eigen::MatrixXd::Identity(o.nt, o.nt);
  const double poincare = std::sqrt(oracle::max_generalized(mass, o.fv_laplacian, all));
  const double inverse = m.h() * std::sqrt(oracle::max_generalized(o.fv_laplacian, mass, all));
  const Eigen::MatrixXd mp = o.mass_p1nc.asDiagonal();
  const double poincare_nc =
      std::sqrt(oracle::max_generalized(mp, o.stiffness, oracle::weighted_mean_free_basis(o.mass_p1nc)));

  CHECK(std::abs(fc.poincare_p0 - poincare) <= 1e-8 * poincare);
  CHECK(std::abs(fc.inverse_p0 - inverse) <= 1e-8 * inverse);
  CHECK(std::abs(fc.poincare_p1nc - poincare_nc) <= 1e-8 * poincare_nc);

  // A single boundary cell still has a finite ratio.
  const auto k = static_cast<std::size_t>(m.edge(static_cast<std::size_t>(m.boundary_edges()[0])).owner);
  VectorP0 v(m);
  v.set(k, {1.0, 0.0});
  CHECK(l2_norm(v) / h_norm(v) <= fc.poincare_p0 * (1 + 1e-12));
}

TEST_CASE("consistency error of trivial pairs") {
  const Mesh m = acute_square_mesh(0);
  ConvectionPair constant = default_convection_pair();
  constant.v = [](const Vec2&) { return Vec2{2.0, -1.0}; };
  constant.exact = [](const Vec2&) { return Vec2{}; };
  CHECK(consistency_error(m, constant) <= 1e-12);

  ConvectionPair still = default_convection_pair();
  still.u = [](const Vec2&) { return Vec2{}; };
  still.exact = [](const Vec2&) { return Vec2{}; };
  CHECK(consistency_error(m, still) == 0.0);
}

TEST_CASE("log-log slope") {
  CHECK(log_log_slope({1.0, 0.5, 0.25}, {3.0, 0.75, 0.1875}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(log_log_slope({0.4, 0.2, 0.1}, {1.0, 0.5, 0.25}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("report formatting") {
  VerificationReport rep;
  rep.add("alpha", 0, 0.5, 1.0, true);
  ConstantSequence s;
  s.name = "beta";
  s.levels = {0, 1};
  s.values = {1.0, 1.5};
  s.finalize();
  CHECK(s.drift == doctest::Approx(1.5));
  CHECK(s.pass);
  rep.constants.push_back(s);
  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str() == "check,level,value,tolerance,pass\nalpha,0,0.5,1,true\nbeta,0,1,inf,true\nbeta,1,1.5,inf,true\n"
                    "beta_drift,-1,1.5,2,true\n");
  CHECK(rep.all_passed());
  rep.add("gamma", 1, 3.0, 1.0, false);
  CHECK_FALSE(rep.all_passed());
  std::ostringstream table;
  rep.print(table);
  CHECK(table.str().find("FAIL") != std::string::npos);
}
