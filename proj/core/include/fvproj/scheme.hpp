#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fvproj/fields.hpp"
#include "fvproj/operators.hpp"
#include "fvproj/problems.hpp"
#include "fvproj/run_config.hpp"

namespace fvproj {

/// Velocity at t_{n-1} and t_n, the last predictor and the pressure p^n.
struct SchemeState {
  P0CapRT0 u_prev;
  P0CapRT0 u_curr;
  VectorP0 u_tilde;
  ScalarP1NC p_curr;
  double t = 0.0;
  int n = 0;
};

/// Quantities of the start-up phase.
struct InitDiagnostics {
  double norm_u0 = 0.0;
  double norm_u1 = 0.0;
  double k_grad_p1 = 0.0;  // k |grad_h p^1|
  /// |u^0 - Pi_P0 u_0|, the defect removed by the initial projection.
  double leray_defect = 0.0;
  double h1_sum() const { return norm_u0 + norm_u1 + k_grad_p1; }
};

/// Per-step diagnostics for the step producing u^n.
struct StepRecord {
  int step = 0;
  double t = 0.0;
  double u_norm = 0.0;            // |u^n|
  double u_tilde_h = 0.0;         // ||u~^n||_h
  double p_norm = 0.0;            // |p^n|
  double div_residual = 0.0;      // |div_h u^n| in the P1NC L2 norm
  double increment = 0.0;         // |u^n - u^{n-1}| / k
  double energy = 0.0;            // |u^n|^2 + k sum ||u~||_h^2
  double pressure_sum = 0.0;      // k sum |p^m|^2
  double orthogonality = 0.0;     // max |(u^n, grad_h p)| / (|u^n| |grad_h p|) over p^{n-1}, p^n
  double pythagoras = 0.0;        // ||u^n|^2 - |u~|^2 + |u^n - u~|^2| / |u~|^2
  double energy_identity = 0.0;   // relative residual of the tested momentum equation
  double normal_jump = 0.0;       // certificate of u^n
  std::size_t momentum_iterations = 0;
  std::size_t pressure_iterations = 0;
};

/// Incremental BDF2 projection scheme with upwind convection on P0 velocities
/// and P1NC pressures.
class ProjectionScheme {
 public:
  ProjectionScheme(const Mesh& mesh, RunConfig config, Problem problem);

  [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
  [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
  [[nodiscard]] const OperatorSet& operators() const noexcept { return ops_; }

  /// u^0 by discrete Leray projection of Pi_P0 u_0, then u^1 and p^1 from one
  /// semi-implicit Euler step and one projection. State is at n = 1.
  SchemeState initialize();
  [[nodiscard]] const InitDiagnostics& init_diagnostics() const noexcept { return init_; }

  /// Momentum matrix for an advecting field w:
  /// (3/(2k)) |K| + L / Re + C(w), shared by both velocity components.
  [[nodiscard]] SparseOperator momentum_matrix(const P0CapRT0& advecting) const;

  /// Predictor u~^{n+1}.
  VectorP0 momentum_step(const SchemeState& state, std::size_t* iterations = nullptr) const;
  /// Pressure increment dp with (grad dp, grad r) = (3/(2k)) (u~, grad r), mean zero.
  ScalarP1NC pressure_increment(const VectorP0& u_tilde, std::size_t* iterations = nullptr,
                                const ScalarP1NC* initial_guess = nullptr) const;
  /// p^{n+1} = mean_zero(p^n + dp).
  ScalarP1NC pressure_step(const SchemeState& state, const VectorP0& u_tilde) const;
  /// u^{n+1} = u~ - (2k/3) grad_h dp, certified.
  P0CapRT0 correction_step(const VectorP0& u_tilde, const ScalarP1NC& dp) const;

  /// One full step n -> n+1, rotating the state.
  StepRecord advance(SchemeState& state);

  /// Forcing f^m = Pi_P0 f(t_m).
  [[nodiscard]] VectorP0 forcing(double t) const;
  /// Certificate tolerance applied to projected velocities.
  [[nodiscard]] double certificate_tolerance() const noexcept { return certificate_tol_; }

 private:
  const Mesh* mesh_;
  RunConfig config_;
  Problem problem_;
  OperatorSet ops_;
  InitDiagnostics init_;
  double certificate_tol_;
  SparseOperator bdf_base_;
  double dissipation_sum_ = 0.0;
  double pressure_sum_ = 0.0;

  StepRecord make_record(int step, const P0CapRT0& u_next, const P0CapRT0& u_old, const VectorP0& u_tilde,
                         const ScalarP1NC& p_old, const ScalarP1NC& p_next) const;
};

/// Discrete Leray projection: w - grad_h phi with (grad phi, grad r) = (w, grad r).
/// Throws CertificateError if the result is not divergence free to `tolerance`.
P0CapRT0 leray_project(const OperatorSet& ops, const VectorP0& w, const SolverConfig& solver,
                       double tolerance = kCertificateTolerance);

struct Trajectory {
  InitDiagnostics init;
  std::vector<StepRecord> steps;  // steps[i] describes u^{i+1}
};

using SnapshotCallback = std::function<void(const SchemeState&)>;

/// Runs n = 1 .. N-1. The callback receives the state after initialization and
/// after every step whose index is a multiple of the configured cadence.
Trajectory run(const Mesh& mesh, const RunConfig& config, const SnapshotCallback& on_snapshot = {});

}  // namespace fvproj
