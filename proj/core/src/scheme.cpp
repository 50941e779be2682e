#include "fvproj/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "fvproj/parallel.hpp"

namespace fvproj {

namespace {

double weighted_norm_sq(std::span<const double> w, std::span<const double> v) {
  const std::size_t n = w.size();
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = w[i % n] * v[i] * v[i];
  return pairwise_sum(terms.data(), terms.size());
}

double mass_dot(std::span<const double> mass_v, std::span<const double> a, std::span<const double> b) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = mass_v[i] * a[i] * b[i];
  return pairwise_sum(terms.data(), terms.size());
}

/// Solves the same per-component matrix for both components of a blocked vector.
std::vector<double> solve_componentwise(const SparseOperator& A, std::span<const double> rhs,
                                        const SolverConfig& cfg, std::span<const double> guess,
                                        std::size_t* iterations) {
  const std::size_t n = A.rows();
  std::vector<double> out(2 * n);
  std::size_t total = 0;
  for (int c = 0; c < 2; ++c) {
    const auto off = static_cast<std::size_t>(c) * n;
    SolveResult res = solve(A, rhs.subspan(off, n), cfg, {}, guess.empty() ? guess : guess.subspan(off, n));
    if (!res.converged) {
      throw SolverError("momentum solve did not converge (" + std::string(to_string(res.method)) +
                        ", relative residual " + std::to_string(res.relative_residual) + ")");
    }
    total += res.iterations;
    std::copy(res.x.begin(), res.x.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  if (iterations != nullptr) {
    *iterations = total;
  }
  return out;
}

}  // namespace

P0CapRT0 leray_project(const OperatorSet& ops, const VectorP0& w, const SolverConfig& solver, double tolerance) {
  std::vector<double> mw(w.size());
  for (std::size_t i = 0; i < mw.size(); ++i) mw[i] = ops.mass_v[i] * w[i];
  const std::vector<double> rhs = ops.G.apply_transpose(mw);
  std::vector<double> phi(rhs.size(), 0.0);
  if (norm2(rhs) > 0.0) {
    SolveResult res = solve(ops.A, rhs, solver, ops.mass_p1nc);
    if (!res.converged) {
      throw SolverError("Leray projection solve did not converge");
    }
    phi = std::move(res.x);
  }
  const std::vector<double> g = ops.G.apply(phi);
  VectorP0 u = w;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= g[i];
  return P0CapRT0::certify(std::move(u), tolerance);
}

ProjectionScheme::ProjectionScheme(const Mesh& mesh, RunConfig config, Problem problem)
    : mesh_(&mesh),
      config_(std::move(config)),
      problem_(std::move(problem)),
      ops_(mesh),
      certificate_tol_(std::max(kCertificateTolerance, 10.0 * config_.pressure_solver.rtol)) {
  config_.validate();
  std::vector<double> d(ops_.mass_p0);
  for (double& v : d) v *= 1.5 / config_.k;
  bdf_base_ = add(1.0, diagonal_matrix(d), 1.0 / config_.reynolds, ops_.L);
}

VectorP0 ProjectionScheme::forcing(double t) const {
  return project_p0(*mesh_, [&](const Vec2& x) { return problem_.forcing(x, t); });
}

SparseOperator ProjectionScheme::momentum_matrix(const P0CapRT0& advecting) const {
  return add(1.0, bdf_base_, 1.0, convection_matrix(advecting));
}

VectorP0 ProjectionScheme::momentum_step(const SchemeState& s, std::size_t* iterations) const {
  const std::size_t nt = mesh_->num_triangles();
  const P0CapRT0 w = P0CapRT0::extrapolate(s.u_curr, s.u_prev);
  const SparseOperator M = momentum_matrix(w);
  const VectorP0 f = forcing(s.t + config_.k);
  const std::vector<double> gp = ops_.G.apply(s.p_curr.values());
  const auto& un = s.u_curr.field();
  const auto& um = s.u_prev.field();
  std::vector<double> rhs(2 * nt);
  const double inv2k = 1.0 / (2.0 * config_.k);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] = ops_.mass_v[i] * ((4.0 * un[i] - um[i]) * inv2k + f[i] - gp[i]);
  }
  return VectorP0(*mesh_, solve_componentwise(M, rhs, config_.momentum_solver, un.values(), iterations));
}

ScalarP1NC ProjectionScheme::pressure_increment(const VectorP0& u_tilde, std::size_t* iterations,
                                                const ScalarP1NC* initial_guess) const {
  std::vector<double> mu(u_tilde.size());
  const double scale = 1.5 / config_.k;
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = scale * ops_.mass_v[i] * u_tilde[i];
  const std::vector<double> rhs = ops_.G.apply_transpose(mu);
  std::span<const double> guess;
  if (initial_guess != nullptr) {
    guess = initial_guess->values();
  }
  SolveResult res = solve(ops_.A, rhs, config_.pressure_solver, ops_.mass_p1nc, guess);
  if (!res.converged) {
    throw SolverError("pressure solve did not converge (relative residual " +
                      std::to_string(res.relative_residual) + ")");
  }
  if (iterations != nullptr) {
    *iterations = res.iterations;
  }
  return ScalarP1NC(*mesh_, std::move(res.x));
}

ScalarP1NC ProjectionScheme::pressure_step(const SchemeState& state, const VectorP0& u_tilde) const {
  return mean_zero(state.p_curr + pressure_increment(u_tilde));
}

P0CapRT0 ProjectionScheme::correction_step(const VectorP0& u_tilde, const ScalarP1NC& dp) const {
  const std::vector<double> g = ops_.G.apply(dp.values());
  VectorP0 u = u_tilde;
  const double c = 2.0 * config_.k / 3.0;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c * g[i];
  return P0CapRT0::certify(std::move(u), certificate_tol_);
}

StepRecord ProjectionScheme::make_record(int step, const P0CapRT0& u_next, const P0CapRT0& u_old,
                                         const VectorP0& u_tilde, const ScalarP1NC& p_old,
                                         const ScalarP1NC& p_next) const {
  const auto& u = u_next.field();
  StepRecord r;
  r.step = step;
  r.t = step * config_.k;
  const double u2 = weighted_norm_sq(ops_.mass_p0, u.values());
  r.u_norm = std::sqrt(u2);
  r.u_tilde_h = h_norm(u_tilde);
  r.p_norm = l2_norm(p_next);
  const std::vector<double> div = ops_.D.apply(u.values());
  r.div_residual = std::sqrt(weighted_norm_sq(ops_.mass_p1nc, div));
  const VectorP0 du = u - u_old.field();
  r.increment = l2_norm(du) / config_.k;
  r.energy = u2 + dissipation_sum_;
  r.pressure_sum = pressure_sum_;
  for (const ScalarP1NC* p : {&p_old, &p_next}) {
    const std::vector<double> gp = ops_.G.apply(p->values());
    const double gn = std::sqrt(weighted_norm_sq(ops_.mass_p0, gp));
    if (gn > 0.0 && r.u_norm > 0.0) {
      r.orthogonality = std::max(r.orthogonality, std::abs(mass_dot(ops_.mass_v, u.values(), gp)) / (r.u_norm * gn));
    }
  }
  const double ut2 = weighted_norm_sq(ops_.mass_p0, u_tilde.values());
  if (ut2 > 0.0) {
    const VectorP0 diff = u - u_tilde;
    const double d2 = weighted_norm_sq(ops_.mass_p0, diff.values());
    r.pythagoras = std::abs(u2 - ut2 + d2) / ut2;
  }
  r.normal_jump = u_next.max_normal_jump();
  return r;
}

SchemeState ProjectionScheme::initialize() {
  const double k = config_.k;
  const VectorP0 w0 = project_p0(*mesh_, problem_.initial_velocity);
  P0CapRT0 u0 = leray_project(ops_, w0, config_.init_solver, certificate_tol_);
  init_.leray_defect = l2_norm(u0.field() - w0);
  init_.norm_u0 = l2_norm(u0.field());

  // Semi-implicit Euler: mass and diffusion implicit, upwind convection with u^0, no pressure.
  std::vector<double> d(ops_.mass_p0);
  for (double& v : d) v /= k;
  const SparseOperator E =
      add(1.0, add(1.0, diagonal_matrix(d), 1.0 / config_.reynolds, ops_.L), 1.0, convection_matrix(u0));
  const VectorP0 f1 = forcing(k);
  std::vector<double> rhs(w0.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = ops_.mass_v[i] * (u0.field()[i] / k + f1[i]);
  const VectorP0 u_star(*mesh_, solve_componentwise(E, rhs, config_.momentum_solver, u0.field().values(), nullptr));

  // Projection: (grad p1, grad r) = (1/k)(u*, grad r), u^1 = u* - k grad p1.
  std::vector<double> mu(u_star.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = ops_.mass_v[i] * u_star[i] / k;
  const std::vector<double> prhs = ops_.G.apply_transpose(mu);
  std::vector<double> p1(prhs.size(), 0.0);
  if (norm2(prhs) > 0.0) {
    p1 = solve_or_throw(ops_.A, prhs, config_.init_solver, ops_.mass_p1nc);
  }
  ScalarP1NC p1f = mean_zero(ScalarP1NC(*mesh_, std::move(p1)));
  const std::vector<double> gp = ops_.G.apply(p1f.values());
  VectorP0 u1 = u_star;
  for (std::size_t i = 0; i < u1.size(); ++i) u1[i] -= k * gp[i];
  P0CapRT0 u1c = P0CapRT0::certify(std::move(u1), certificate_tol_);
  init_.norm_u1 = l2_norm(u1c.field());
  init_.k_grad_p1 = k * std::sqrt(weighted_norm_sq(ops_.mass_p0, gp));

  dissipation_sum_ = 0.0;
  pressure_sum_ = k * l2_inner(p1f, p1f);
  SchemeState s{u0, u1c, u_star, p1f, k, 1};
  return s;
}

StepRecord ProjectionScheme::advance(SchemeState& s) {
  const double k = config_.k;
  std::size_t mom_it = 0;
  std::size_t p_it = 0;
  const VectorP0 u_tilde = momentum_step(s, &mom_it);
  const ScalarP1NC dp = pressure_increment(u_tilde, &p_it);
  ScalarP1NC p_next = mean_zero(s.p_curr + dp);
  P0CapRT0 u_next = correction_step(u_tilde, dp);
  if (config_.perturbation_gain != 1.0) {
    u_next = P0CapRT0::certify(config_.perturbation_gain * u_next.field(), certificate_tol_);
  }

  // Momentum equation tested with 4k u~, written through the BDF2 identity
  // 2(3a - 4b + c, a) = |a|^2 - |b|^2 + |2a - b|^2 - |2b - c|^2 + |a - 2b + c|^2.
  const auto& un = s.u_curr.field();
  const auto& um = s.u_prev.field();
  const auto& m = ops_.mass_p0;
  const double ut_h2 = std::pow(h_norm(u_tilde), 2);
  const P0CapRT0 w = P0CapRT0::extrapolate(s.u_curr, s.u_prev);
  const std::vector<double> gp = ops_.G.apply(s.p_curr.values());
  const VectorP0 f = forcing(s.t + k);
  const double terms[] = {
      weighted_norm_sq(m, u_tilde.values()),
      -weighted_norm_sq(m, un.values()),
      weighted_norm_sq(m, (2.0 * u_tilde - un).values()),
      -weighted_norm_sq(m, (2.0 * un - um).values()),
      weighted_norm_sq(m, (u_tilde - 2.0 * un + um).values()),
      4.0 * k / config_.reynolds * ut_h2,
      4.0 * k * trilinear_form(w, u_tilde, u_tilde),
      4.0 * k * mass_dot(ops_.mass_v, gp, u_tilde.values()),
      -4.0 * k * mass_dot(ops_.mass_v, f.values(), u_tilde.values()),
  };
  double sum = 0.0;
  double scale = 0.0;
  for (double t : terms) {
    sum += t;
    scale += std::abs(t);
  }

  dissipation_sum_ += k * ut_h2;
  pressure_sum_ += k * l2_inner(p_next, p_next);
  StepRecord rec = make_record(s.n + 1, u_next, s.u_curr, u_tilde, s.p_curr, p_next);
  rec.energy_identity = scale > 0.0 ? std::abs(sum) / scale : 0.0;
  rec.momentum_iterations = mom_it;
  rec.pressure_iterations = p_it;

  s.u_prev = std::move(s.u_curr);
  s.u_curr = std::move(u_next);
  s.u_tilde = u_tilde;
  s.p_curr = std::move(p_next);
  s.n += 1;
  s.t = s.n * k;
  return rec;
}

Trajectory run(const Mesh& mesh, const RunConfig& config, const SnapshotCallback& on_snapshot) {
  config.validate();
  if (!config.allow_degenerate && !validate_mesh(mesh).admissible) {
    throw MeshError("mesh is not admissible (a right or obtuse angle); pass allow_degenerate to run anyway");
  }
  if (!(validate_mesh(mesh).min_distance_ratio > 0.0)) {
    throw MeshError("a circumcenter distance vanishes, so the two-point transmissibility is undefined");
  }
  ProjectionScheme scheme(mesh, config, make_problem(config.problem, config.reynolds));
  SchemeState s = scheme.initialize();
  Trajectory traj;
  traj.init = scheme.init_diagnostics();
  {
    StepRecord first;
    first.step = 1;
    first.t = config.k;
    first.u_norm = traj.init.norm_u1;
    first.u_tilde_h = h_norm(s.u_tilde);
    first.p_norm = l2_norm(s.p_curr);
    const std::vector<double> div = scheme.operators().D.apply(s.u_curr.field().values());
    first.div_residual = std::sqrt(weighted_norm_sq(scheme.operators().mass_p1nc, div));
    first.increment = l2_norm(s.u_curr.field() - s.u_prev.field()) / config.k;
    first.energy = traj.init.norm_u1 * traj.init.norm_u1;
    first.pressure_sum = config.k * first.p_norm * first.p_norm;
    first.normal_jump = s.u_curr.max_normal_jump();
    traj.steps.push_back(first);
  }
  if (on_snapshot && config.cadence > 0) {
    on_snapshot(s);
  }
  for (int n = 1; n < config.steps; ++n) {
    traj.steps.push_back(scheme.advance(s));
    if (on_snapshot && config.cadence > 0 && s.n % config.cadence == 0) {
      on_snapshot(s);
    }
  }
  return traj;
}

}  // namespace fvproj
