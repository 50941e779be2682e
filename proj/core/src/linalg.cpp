#include "fvproj/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

#include "fvproj/parallel.hpp"

namespace fvproj {

namespace {

struct Problem {
  const SparseOperator& A;
  std::vector<double> b;
  std::span<const double> weights;
  std::vector<double> inv_diag;
  double threshold = 0.0;
  double bnorm = 0.0;
  std::size_t max_iterations = 0;

  void project(std::span<double> x) const {
    if (!weights.empty()) {
      remove_weighted_mean(x, weights);
    }
  }

  void precondition(std::span<const double> r, std::span<double> z) const {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag[i] * r[i];
    project(z);
  }

  double residual(std::span<const double> x, std::span<double> r) const {
    A.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
  }
};

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

SolveResult finish(const Problem& P, std::vector<double> x, std::size_t iterations, bool breakdown,
                   SolverMethod method) {
  P.project(x);
  std::vector<double> r(x.size());
  SolveResult res;
  res.residual_norm = P.residual(x, r);
  res.relative_residual = P.bnorm > 0.0 ? res.residual_norm / P.bnorm : res.residual_norm;
  res.converged = std::isfinite(res.residual_norm) && res.residual_norm <= P.threshold;
  res.breakdown = breakdown;
  res.iterations = iterations;
  res.method = method;
  res.x = std::move(x);
  return res;
}

SolveResult run_cg(const Problem& P, std::vector<double> x) {
  const std::size_t n = x.size();
  std::vector<double> r(n), z(n), p(n), Ap(n);
  std::size_t it = 0;
  bool breakdown = false;
  // Restart from the true residual whenever the recurrence claims convergence
  // but the recomputed residual disagrees.
  while (it < P.max_iterations && !breakdown) {
    double rnorm = P.residual(x, r);
    if (rnorm <= P.threshold) {
      break;
    }
    P.precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (it < P.max_iterations) {
      P.A.apply(p, Ap);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0) || !std::isfinite(pAp)) {
        breakdown = true;
        break;
      }
      const double alpha = rz / pAp;
      axpy(alpha, p, x);
      axpy(-alpha, Ap, r);
      ++it;
      rnorm = norm2(r);
      if (rnorm <= P.threshold) {
        break;
      }
      P.precondition(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  return finish(P, std::move(x), it, breakdown, SolverMethod::cg);
}

SolveResult run_bicgstab(const Problem& P, std::vector<double> x) {
  const std::size_t n = x.size();
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), y(n), s(n), z(n), t(n);
  std::vector<double> best = x;
  double best_norm = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  bool breakdown = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (it < P.max_iterations && !breakdown) {
    double rnorm = P.residual(x, r);
    if (rnorm < best_norm) {
      best_norm = rnorm;
      best = x;
    }
    if (rnorm <= P.threshold) {
      break;
    }
    rhat = r;
    const double rhat_norm = rnorm;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    while (it < P.max_iterations) {
      const double rho_new = dot(rhat, r);
      if (std::abs(rho_new) <= eps * eps * rhat_norm * rnorm || !std::isfinite(rho_new)) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      P.precondition(p, y);
      P.A.apply(y, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      const double snorm = norm2(s);
      if (snorm <= P.threshold) {
        axpy(alpha, y, x);
        rnorm = snorm;
        break;
      }
      P.precondition(s, z);
      P.A.apply(z, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i] + omega * z[i];
      for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
      rnorm = norm2(r);
      if (rnorm < best_norm && all_finite(x)) {
        best_norm = rnorm;
        best = x;
      }
      if (rnorm <= P.threshold) {
        break;
      }
      if (omega == 0.0 || !std::isfinite(omega)) {
        breakdown = true;
        break;
      }
    }
    if (!all_finite(x)) {
      breakdown = true;
    }
  }
  std::vector<double> r_final(n);
  if (!all_finite(x) || P.residual(x, r_final) > best_norm) {
    x = best;
  }
  return finish(P, std::move(x), it, breakdown, SolverMethod::bicgstab);
}

SolveResult run_gmres(const Problem& P, std::vector<double> x, int restart) {
  const std::size_t n = x.size();
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(restart), std::max<std::size_t>(n, 1));
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), r(n), z(n), w(n);
  std::size_t it = 0;
  bool breakdown = false;

  while (it < P.max_iterations) {
    const double beta = P.residual(x, r);
    if (beta <= P.threshold || !std::isfinite(beta)) {
      breakdown = !std::isfinite(beta);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t k = 0;
    bool stagnated = false;
    for (; k < m && it < P.max_iterations; ++k) {
      P.precondition(V[k], z);
      P.A.apply(z, w);
      for (std::size_t i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        axpy(-H[i][k], V[i], w);
      }
      H[k + 1][k] = norm2(w);
      for (std::size_t i = 0; i < k; ++i) {
        const double tmp = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = tmp;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      if (denom == 0.0) {
        stagnated = true;
        break;
      }
      cs[k] = H[k][k] / denom;
      sn[k] = H[k + 1][k] / denom;
      const double hk1 = H[k + 1][k];
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++it;
      if (std::abs(g[k + 1]) <= P.threshold || hk1 <= 1e-14 * beta) {
        ++k;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / hk1;
    }
    if (k == 0) {
      breakdown = stagnated;
      break;
    }
    std::vector<double> y(k);
    for (std::size_t ii = k; ii-- > 0;) {
      double s = g[ii];
      for (std::size_t j = ii + 1; j < k; ++j) s -= H[ii][j] * y[j];
      y[ii] = s / H[ii][ii];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], V[j], w);
    P.precondition(w, z);
    axpy(1.0, z, x);
    if (stagnated) {
      breakdown = true;
      break;
    }
  }
  return finish(P, std::move(x), it, breakdown, SolverMethod::gmres);
}

SolveResult run_dense(const Problem& P) {
  const std::size_t n = P.b.size();
  const bool bordered = !P.weights.empty();
  const auto N = static_cast<Eigen::Index>(bordered ? n + 1 : n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  const auto off = P.A.row_offsets();
  const auto ids = P.A.col_ids();
  const auto vals = P.A.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      M(static_cast<Eigen::Index>(i), ids[p]) = vals[p];
    }
    rhs(static_cast<Eigen::Index>(i)) = P.b[i];
  }
  if (bordered) {
    for (std::size_t i = 0; i < n; ++i) {
      M(static_cast<Eigen::Index>(i), N - 1) = P.weights[i];
      M(N - 1, static_cast<Eigen::Index>(i)) = P.weights[i];
    }
  }
  const Eigen::VectorXd sol = M.fullPivLu().solve(rhs);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = sol(static_cast<Eigen::Index>(i));
  return finish(P, std::move(x), 1, !all_finite(x), SolverMethod::dense_lu);
}

SolveResult run_method(const Problem& P, SolverMethod method, std::vector<double> x, int restart) {
  switch (method) {
    case SolverMethod::cg:
      return run_cg(P, std::move(x));
    case SolverMethod::bicgstab:
      return run_bicgstab(P, std::move(x));
    case SolverMethod::gmres:
      return run_gmres(P, std::move(x), restart);
    case SolverMethod::dense_lu:
      return run_dense(P);
  }
  throw std::logic_error("unknown solver method");
}

std::optional<SolverMethod> next_method(SolverMethod m, std::size_t n) {
  switch (m) {
    case SolverMethod::bicgstab:
      return SolverMethod::gmres;
    case SolverMethod::gmres:
      if (n < kDenseFallbackLimit) {
        return SolverMethod::dense_lu;
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::cg:
      return "cg";
    case SolverMethod::bicgstab:
      return "bicgstab";
    case SolverMethod::gmres:
      return "gmres";
    case SolverMethod::dense_lu:
      return "dense_lu";
  }
  return "unknown";
}

std::optional<SolverMethod> parse_solver_method(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto m : {SolverMethod::cg, SolverMethod::bicgstab, SolverMethod::gmres, SolverMethod::dense_lu}) {
    if (lower == to_string(m)) {
      return m;
    }
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (restart < 1) {
    throw std::invalid_argument("GMRES restart length must be at least 1");
  }
}

void remove_weighted_mean(std::span<double> x, std::span<const double> w) {
  if (w.size() != x.size()) {
    throw DimensionError("constraint weights size mismatch");
  }
  const double total = pairwise_sum(w.data(), w.size());
  const double m = dot(std::span<const double>(x.data(), x.size()), w) / total;
  for (double& v : x) v -= m;
}

SolveResult solve(const SparseOperator& A, std::span<const double> b, const SolverConfig& config,
                  std::span<const double> zero_mean_weights, std::span<const double> x0) {
  config.validate();
  const std::size_t n = A.rows();
  if (A.cols() != n) {
    throw DimensionError("solve requires a square matrix");
  }
  if (b.size() != n || (!x0.empty() && x0.size() != n) ||
      (!zero_mean_weights.empty() && zero_mean_weights.size() != n)) {
    throw DimensionError("right-hand side size mismatch");
  }
  Problem P{A, std::vector<double>(b.begin(), b.end()), zero_mean_weights, {}, 0.0, 0.0, 0};
  if (!zero_mean_weights.empty() && n > 0) {
    const double m = pairwise_sum(P.b.data(), n) / static_cast<double>(n);
    for (double& v : P.b) v -= m;
  }
  P.inv_diag = A.diagonal();
  for (double& d : P.inv_diag) d = (d != 0.0 && std::isfinite(d)) ? 1.0 / d : 1.0;
  P.bnorm = norm2(P.b);
  P.threshold = std::max(config.rtol * P.bnorm, config.atol);
  P.max_iterations = config.max_iterations > 0 ? config.max_iterations : 10 * std::max<std::size_t>(n, 1);

  std::vector<double> x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
  P.project(x);

  SolverMethod method = config.method;
  std::vector<SolverMethod> attempts;
  for (;;) {
    attempts.push_back(method);
    SolveResult res = run_method(P, method, x, config.restart);
    res.attempts = attempts;
    if (res.converged || !config.fallback) {
      return res;
    }
    const auto next = next_method(method, n);
    if (!next) {
      return res;
    }
    if (all_finite(res.x)) {
      x = res.x;
    }
    method = *next;
  }
}

std::vector<double> solve_or_throw(const SparseOperator& A, std::span<const double> b,
                                   const SolverConfig& config, std::span<const double> zero_mean_weights,
                                   std::span<const double> x0) {
  SolveResult res = solve(A, b, config, zero_mean_weights, x0);
  if (!res.converged) {
    throw SolverError(std::string(to_string(res.method)) + " did not converge: relative residual " +
                      std::to_string(res.relative_residual) + " after " + std::to_string(res.iterations) +
                      " iterations");
  }
  return std::move(res.x);
}

EigenPair lanczos(const LinearMap& op, std::size_t n, Extremal which, const LanczosOptions& options,
                  std::span<const std::vector<double>> deflate) {
  if (n == 0 || deflate.size() >= n) {
    throw std::invalid_argument("Lanczos search space is empty");
  }
  auto orthogonalize = [&](std::span<double> v, const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& d : deflate) axpy(-dot(v, d), d, v);
      for (const auto& q : basis) axpy(-dot(v, q), q, v);
    }
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  std::vector<std::vector<double>> Q;
  orthogonalize(v, Q);
  double vn = norm2(v);
  for (double& x : v) x /= vn;

  const std::size_t m_max = std::min(options.max_steps, n - deflate.size());
  std::vector<double> alpha, beta;
  std::vector<double> w(n);
  EigenPair out;
  Eigen::VectorXd ritz_vec;
  double theta = 0.0;

  for (std::size_t j = 0; j < m_max; ++j) {
    Q.push_back(v);
    op(Q.back(), w);
    const double a = dot(w, Q.back());
    alpha.push_back(a);
    orthogonalize(w, Q);
    const double b = norm2(w);
    beta.push_back(b);

    const bool last = j + 1 == m_max;
    const bool invariant = b <= 1e-14 * std::max(1.0, std::abs(a));
    if (j % 5 == 4 || last || invariant) {
      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub(std::max<Eigen::Index>(k - 1, 0));
      for (Eigen::Index i = 0; i + 1 < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const Eigen::Index idx = which == Extremal::largest ? k - 1 : 0;
      theta = es.eigenvalues()(idx);
      ritz_vec = es.eigenvectors().col(idx);
      const double bound = b * std::abs(ritz_vec(k - 1));
      if (bound <= options.tol * std::max(std::abs(theta), 1e-300) || invariant) {
        out.converged = true;
        break;
      }
    }
    if (invariant) {
      break;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t j = 0; j < static_cast<std::size_t>(ritz_vec.size()); ++j) {
    axpy(ritz_vec(static_cast<Eigen::Index>(j)), Q[j], x);
  }
  const double xn = norm2(x);
  for (double& e : x) e /= xn;
  op(x, w);
  axpy(-theta, x, w);
  out.value = theta;
  out.residual = norm2(w);
  out.steps = alpha.size();
  out.vector = std::move(x);
  return out;
}

}  // namespace fvproj
