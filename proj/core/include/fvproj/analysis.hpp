#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fvproj/fields.hpp"
#include "fvproj/linalg.hpp"
#include "fvproj/scheme.hpp"

namespace fvproj {

struct CheckResult {
  std::string name;
  int level = 0;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// An empirical constant measured across refinement levels.
struct ConstantSequence {
  std::string name;
  std::vector<int> levels;
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  /// max / min.
  double drift = 0.0;
  double drift_tolerance = 2.0;
  bool pass = false;

  void finalize();
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<ConstantSequence> constants;

  [[nodiscard]] bool all_passed() const;
  void add(std::string name, int level, double value, double tolerance, bool pass);
  void append(const VerificationReport& other);

  /// `check,level,value,tolerance,pass`; constant sequences contribute one
  /// row per level plus a `<name>_drift` row with level -1.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  /// Aligned human-readable table.
  void print(std::ostream& out) const;
};

struct CheckOptions {
  int level = 0;
  std::uint64_t seed = 1;
  int samples = 32;
  /// Relative tolerance of the identity checks.
  double tolerance = 1e-11;
};

/// Random-field battery: gradient/divergence adjointness (scalar and matrix
/// form), two-point Laplacian coercivity and continuity, the P1NC Laplacian
/// identity, P1NC mass diagonality, and orthogonality plus Pythagoras of the
/// discrete Leray projection.
VerificationReport check_identities(const Mesh& mesh, const CheckOptions& options = {});

struct ConvectionCheck {
  VerificationReport report;
  /// max over candidate u of sup_{v, w} |b_h(u, v, w)| / (|u| ||v||_h ||w||_h).
  double stability_constant = 0.0;
};

/// Positivity b_h(u, v, v) >= 0 for discretely solenoidal u, b_h with constant
/// transported fields, and the stability constant.
ConvectionCheck check_convection(const Mesh& mesh, const CheckOptions& options = {});

/// Random discretely divergence-free velocity (Leray projection of uniform noise).
P0CapRT0 random_solenoidal(const OperatorSet& ops, std::uint64_t seed);

struct InfSupOptions {
  /// Dense eigensolver up to this many edges, Lanczos above.
  std::size_t dense_limit = 1500;
  bool force_iterative = false;
  double lanczos_tol = 1e-9;
  std::uint64_t seed = 7;
};

struct InfSupResult {
  double beta = 0.0;
  /// Minimizing pressure (mean zero, unit L2 norm).
  std::vector<double> pressure_mode;
  bool iterative = false;
  std::size_t lanczos_steps = 0;
  /// For the minimizing mode q: |grad_h q|^2 / ||grad_h q||_h, the value of the
  /// supremand at v = grad_h q. Never exceeds beta |q|.
  double gradient_candidate = 0.0;
  /// gradient_candidate / (h ||q||_{1,h}).
  double gradient_candidate_ratio = 0.0;
};

/// beta_h = min over mean-zero q of sup_v -(q, div_h v) / (||v||_h |q|), from the
/// smallest nonzero eigenvalue of S = B H^{-1} B^T in the P1NC mass inner
/// product (B = G^T M_v, H the ||.||_h Gram matrix).
InfSupResult estimate_infsup(const Mesh& mesh, const InfSupOptions& options = {});

/// Analytic pair for the convection consistency study.
struct ConvectionPair {
  VectorFunction u;        // divergence free, zero normal trace
  VectorFunction v;        // transported field
  VectorFunction exact;    // (u . grad v1, u . grad v2)
};

/// u = curl((x(1-x)y(1-y))^2), v = (sin(pi x) sin(pi y), 0).
ConvectionPair default_convection_pair();

struct RateResult {
  std::vector<int> levels;
  std::vector<double> h;
  std::vector<double> errors;
  /// Least-squares slope of log(error) against log(h); 0 if any error vanishes.
  double rate = 0.0;
};

/// || Pi_P0 b~(u, v) - b~_h(Pi_RT0 u, Pi~ v) ||_{-1,h} on the acute family.
RateResult consistency_rate(int levels, int first_level = 0, const ConvectionPair& pair = default_convection_pair());
double consistency_error(const Mesh& mesh, const ConvectionPair& pair);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct FunctionalConstants {
  double poincare_p0 = 0.0;    // max |v| / ||v||_h
  double inverse_p0 = 0.0;     // max h ||v||_h / |v|
  double poincare_p1nc = 0.0;  // max |q| / |grad_h q| over mean-zero q
};

/// Extremal ratios by Lanczos on the associated generalized eigenproblems
/// (shift-invert for the Poincare constants), from a seeded start vector.
FunctionalConstants functional_constants(const Mesh& mesh, std::uint64_t seed = 11);

/// Sequences over the given acute-family levels with a < 2x drift check.
std::vector<ConstantSequence> poincare_inverse_constants(const std::vector<int>& levels, std::uint64_t seed = 11);

struct MonitorOptions {
  double factor = 10.0;
  /// Pressure solver tolerance; |div_h u^m| <= 10 rtol |u^m| after every projection.
  double solver_rtol = 1e-10;
  /// Orthogonality and Pythagoras residuals of every projection.
  double identity_tolerance = 1e-11;
  /// Relative residual of the momentum equation tested with 4k u~.
  double energy_tolerance = 1e-10;
};

/// Bounded-growth checks over m in [N/10, N]: the energy |u^m|^2 + k sum ||u~||_h^2
/// and the increments |u^m - u^{m-1}| / k against factor x their value at
/// m = N/10, and the pressure sum k sum |p^n|^2 through its time average. The
/// start-up quantities are echoed as checks without tolerance. Per-step
/// projection residuals are checked against the tolerances in `options`.
VerificationReport stability_monitors(const Trajectory& trajectory, int level = 0,
                                      const MonitorOptions& options = {});

struct VerifyOptions {
  std::vector<int> levels{0, 1, 2};
  std::uint64_t seed = 1;
  int samples = 32;
};

/// All checks on the acute family: identities and convection per level, and
/// the inf-sup, consistency, functional-constant and convection-constant sweeps.
VerificationReport verify_all(const VerifyOptions& options = {});

}  // namespace fvproj
