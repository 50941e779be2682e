#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fvproj/sparse.hpp"

namespace fvproj {

enum class SolverMethod { cg, bicgstab, gmres, dense_lu };

std::string_view to_string(SolverMethod m);
/// Accepts "cg", "bicgstab", "gmres", "dense_lu" (case-insensitive).
std::optional<SolverMethod> parse_solver_method(std::string_view s);

struct SolverConfig {
  SolverMethod method = SolverMethod::cg;
  double rtol = 1e-10;
  double atol = 1e-14;
  /// 0 selects 10 * n.
  std::size_t max_iterations = 0;
  int restart = 50;
  /// BiCGStab falls back to GMRES, then to a dense LU factorization below
  /// kDenseFallbackLimit unknowns.
  bool fallback = true;

  /// Throws std::invalid_argument on non-positive tolerances or restart < 1.
  void validate() const;
};

inline constexpr std::size_t kDenseFallbackLimit = 2000;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveResult {
  std::vector<double> x;
  bool converged = false;
  bool breakdown = false;
  std::size_t iterations = 0;
  /// ||b - A x|| / ||b|| (with the compatible part of b under a constraint).
  double relative_residual = 0.0;
  double residual_norm = 0.0;
  /// Method that produced x; differs from the configured one after a fallback.
  SolverMethod method = SolverMethod::cg;
  std::vector<SolverMethod> attempts;
};

/// Solves A x = b. A non-empty `zero_mean_weights` restricts the solution to
/// sum_i w_i x_i = 0 for a matrix whose kernel is the constants: the
/// incompatible (Euclidean mean) part of b is removed, and the weighted mean is
/// projected out of the initial guess, every preconditioned correction and the
/// result. Never throws on non-convergence; inspect `converged`.
SolveResult solve(const SparseOperator& A, std::span<const double> b, const SolverConfig& config,
                  std::span<const double> zero_mean_weights = {}, std::span<const double> x0 = {});

/// Like solve(), but throws SolverError when the result did not converge.
std::vector<double> solve_or_throw(const SparseOperator& A, std::span<const double> b,
                                   const SolverConfig& config,
                                   std::span<const double> zero_mean_weights = {},
                                   std::span<const double> x0 = {});

/// x - (w.x / sum w) 1.
void remove_weighted_mean(std::span<double> x, std::span<const double> w);

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

enum class Extremal { largest, smallest };

struct LanczosOptions {
  std::size_t max_steps = 300;
  double tol = 1e-10;
  std::uint64_t seed = 12345;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  std::size_t steps = 0;
  bool converged = false;
  /// ||op(v) - value v|| for the returned unit vector.
  double residual = 0.0;
};

/// Extreme eigenpair of a symmetric operator by Lanczos with full
/// reorthogonalization. The start vector is seeded; `deflate` lists
/// orthonormal vectors excluded from the search space.
EigenPair lanczos(const LinearMap& op, std::size_t n, Extremal which, const LanczosOptions& options = {},
                  std::span<const std::vector<double>> deflate = {});

}  // namespace fvproj
