#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "fvproj/analysis.hpp"
#include "fvproj/linalg.hpp"
#include "fvproj/operators.hpp"
#include "support/helpers.hpp"

using namespace fvproj;
using testing_support::dense;
using testing_support::random_values;
using testing_support::to_eigen;

namespace {

/// Nonsymmetric momentum-type matrix: |K| / dt + L / Re + C(u).
SparseOperator momentum_like(const Mesh& m) {
  const OperatorSet ops(m);
  std::vector<double> mass(ops.mass_p0);
  for (double& x : mass) x *= 150.0;
  const SparseOperator c = convection_matrix(random_solenoidal(ops, 3));
  return add(1.0, add(1.0, diagonal_matrix(mass), 0.01, ops.L), 20.0, c);
}

double rel_err(std::span<const double> x, const Eigen::VectorXd& ref) {
  return (to_eigen(x) - ref).norm() / ref.norm();
}

}  // namespace

TEST_CASE("sparse construction and arithmetic") {
  TripletBuilder tb(2, 3);
  tb.add(1, 2, 1.0);
  tb.add(0, 0, 2.0);
  tb.add(1, 2, 0.5);
  tb.add(0, 1, -1.0);
  const SparseOperator a = tb.build();
  CHECK(a.nnz() == 3);
  CHECK(a.at(1, 2) == 1.5);
  CHECK(a.at(1, 0) == 0.0);

  Eigen::MatrixXd ad(2, 3);
  ad << 2, -1, 0, 0, 0, 1.5;
  CHECK((dense(a) - ad).norm() == 0.0);
  CHECK((dense(a.transpose()) - ad.transpose()).norm() == 0.0);
  CHECK((dense(multiply(a, a.transpose())) - ad * ad.transpose()).norm() <= 1e-15);
  CHECK((dense(add(2.0, a, -1.0, a)) - ad).norm() <= 1e-15);

  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto y = a.apply(x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 4.5);
  CHECK(a.apply_transpose(std::vector<double>{1.0, 1.0})[2] == 1.5);

  CHECK_THROWS_AS(a.apply(std::vector<double>{1.0}), DimensionError);
  CHECK_THROWS_AS(SparseOperator(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), DimensionError);
  CHECK_THROWS_AS(SparseOperator(1, 2, {0, 1}, {5}, {1.0}), DimensionError);
  CHECK_THROWS_AS(tb.add(4, 0, 1.0), DimensionError);
  CHECK(identity(4).at(3, 3) == 1.0);
}

TEST_CASE("solver method names") {
  CHECK(parse_solver_method("CG") == SolverMethod::cg);
  CHECK(parse_solver_method("bicgstab") == SolverMethod::bicgstab);
  CHECK(parse_solver_method("GMRES") == SolverMethod::gmres);
  CHECK(parse_solver_method("dense_lu") == SolverMethod::dense_lu);
  CHECK_FALSE(parse_solver_method("jacobi").has_value());
  CHECK(to_string(SolverMethod::bicgstab) == "bicgstab");

  SolverConfig bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  SolverConfig bad_restart;
  bad_restart.restart = 0;
  CHECK_THROWS_AS(bad_restart.validate(), std::invalid_argument);
}

TEST_CASE("identity system") {
  std::mt19937_64 rng(1);
  const auto b = random_values(rng, 20);
  for (SolverMethod method : {SolverMethod::cg, SolverMethod::bicgstab, SolverMethod::gmres, SolverMethod::dense_lu}) {
    SolverConfig cfg;
    cfg.method = method;
    const auto res = solve(identity(20), b, cfg);
    CHECK(res.converged);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(res.x[i] - b[i]) <= 1e-14);
  }
}

TEST_CASE("iterative and dense solvers agree on a nonsymmetric system") {
  const Mesh m = acute_square_mesh(0);
  const SparseOperator a = momentum_like(m);
  CHECK(a.asymmetry() > 0.0);
  std::mt19937_64 rng(2);
  const auto b = random_values(rng, a.rows());
  const Eigen::VectorXd ref = dense(a).fullPivLu().solve(to_eigen(b));
  for (SolverMethod method : {SolverMethod::bicgstab, SolverMethod::gmres, SolverMethod::dense_lu}) {
    CAPTURE(to_string(method));
    SolverConfig cfg;
    cfg.method = method;
    cfg.rtol = 1e-12;
    cfg.fallback = false;
    const auto res = solve(a, b, cfg);
    CHECK(res.converged);
    CHECK(res.method == method);
    CHECK(rel_err(res.x, ref) <= 1e-8);
  }
}

TEST_CASE("constrained Laplacian solves agree with a dense solve") {
  const Mesh m = acute_square_mesh(0);
  const OperatorSet ops(m);
  std::mt19937_64 rng(3);
  auto b = random_values(rng, m.num_edges());
  const std::vector<double> ones(m.num_edges(), 1.0);
  remove_weighted_mean(b, ones);

  // Dense oracle: bordered system with the mass-weighted mean constraint.
  const auto n = static_cast<Eigen::Index>(m.num_edges());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = dense(ops.A);
  k.block(0, n, n, 1) = to_eigen(ops.mass_p1nc);
  k.block(n, 0, 1, n) = to_eigen(ops.mass_p1nc).transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = to_eigen(b);
  const Eigen::VectorXd ref = k.fullPivLu().solve(rhs).head(n);

  for (SolverMethod method : {SolverMethod::cg, SolverMethod::bicgstab, SolverMethod::gmres, SolverMethod::dense_lu}) {
    CAPTURE(to_string(method));
    SolverConfig cfg;
    cfg.method = method;
    cfg.rtol = 1e-12;
    cfg.fallback = false;
    const auto res = solve(ops.A, b, cfg, ops.mass_p1nc);
    CHECK(res.converged);
    CHECK(rel_err(res.x, ref) <= 1e-8);
    CHECK(std::abs(dot(res.x, ops.mass_p1nc)) <= 1e-12 * norm2(res.x));
  }
}

TEST_CASE("singular system without a constraint is flagged") {
  const Mesh m = acute_square_mesh(0);
  const OperatorSet ops(m);
  // Incompatible: a constant right-hand side is orthogonal to the range.
  const std::vector<double> b(m.num_edges(), 1.0);
  SolverConfig cfg;
  cfg.max_iterations = 500;
  cfg.fallback = false;
  const auto res = solve(ops.A, b, cfg);
  CHECK_FALSE(res.converged);
  CHECK_THROWS_AS(solve_or_throw(ops.A, b, cfg), SolverError);
}

TEST_CASE("fallback chain recovers from an iteration cap") {
  const Mesh m = acute_square_mesh(0);
  const SparseOperator a = momentum_like(m);
  std::mt19937_64 rng(4);
  const auto b = random_values(rng, a.rows());
  SolverConfig cfg;
  cfg.method = SolverMethod::bicgstab;
  cfg.max_iterations = 1;
  cfg.rtol = 1e-12;
  const auto res = solve(a, b, cfg);
  CHECK(res.converged);
  CHECK(res.attempts.size() >= 2);
  CHECK(res.attempts.front() == SolverMethod::bicgstab);
  CHECK(res.method != SolverMethod::bicgstab);

  cfg.fallback = false;
  CHECK_FALSE(solve(a, b, cfg).converged);
}

TEST_CASE("warm start from the solution needs no iterations") {
  const Mesh m = acute_square_mesh(0);
  const OperatorSet ops(m);
  std::mt19937_64 rng(5);
  const auto b = random_values(rng, m.num_triangles());
  SolverConfig cfg;
  cfg.rtol = 1e-12;
  const auto first = solve(ops.L, b, cfg);
  const auto second = solve(ops.L, b, cfg, {}, first.x);
  CHECK(second.converged);
  CHECK(second.iterations <= 1);
}

TEST_CASE("Lanczos matches a dense eigensolver") {
  const Mesh m = acute_square_mesh(0);
  const OperatorSet ops(m);
  const Eigen::MatrixXd l = dense(ops.L);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();

  const LinearMap op = [&](std::span<const double> x, std::span<double> y) { ops.L.apply(x, y); };
  LanczosOptions opts;
  opts.tol = 1e-12;
  const auto hi = lanczos(op, m.num_triangles(), Extremal::largest, opts);
  CHECK(hi.converged);
  CHECK(std::abs(hi.value - ev(ev.size() - 1)) <= 1e-8 * ev(ev.size() - 1));
  const auto lo = lanczos(op, m.num_triangles(), Extremal::smallest, opts);
  CHECK(std::abs(lo.value - ev(0)) <= 1e-8 * ev(ev.size() - 1));

  // Deflating the constants of the P1NC stiffness gives its first nonzero eigenvalue.
  const Eigen::MatrixXd a = dense(ops.A);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a, Eigen::EigenvaluesOnly);
  const double n = static_cast<double>(m.num_edges());
  std::vector<std::vector<double>> defl{std::vector<double>(m.num_edges(), 1.0 / std::sqrt(n))};
  const LinearMap aop = [&](std::span<const double> x, std::span<double> y) { ops.A.apply(x, y); };
  const auto first = lanczos(aop, m.num_edges(), Extremal::smallest, opts, defl);
  CHECK(std::abs(ea.eigenvalues()(0)) <= 1e-10 * ea.eigenvalues().maxCoeff());
  CHECK(std::abs(first.value - ea.eigenvalues()(1)) <= 1e-8 * ea.eigenvalues().maxCoeff());
}
