#include "fvproj/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include "fvproj/operators.hpp"
#include "fvproj/output.hpp"
#include "fvproj/parallel.hpp"
#include "fvproj/problems.hpp"

namespace fvproj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::mt19937_64 make_rng(std::uint64_t seed, int level, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

ConstantSequence make_sequence(std::string name, double drift_tolerance = 2.0) {
  ConstantSequence s;
  s.name = std::move(name);
  s.drift_tolerance = drift_tolerance;
  return s;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

SolverConfig tight_cg() {
  SolverConfig c;
  c.method = SolverMethod::cg;
  c.rtol = 1e-13;
  c.atol = 1e-300;
  return c;
}

}  // namespace

void ConstantSequence::finalize() {
  if (values.empty()) {
    min = max = drift = 0.0;
    pass = false;
    return;
  }
  min = *std::min_element(values.begin(), values.end());
  max = *std::max_element(values.begin(), values.end());
  drift = min > 0.0 ? max / min : kInf;
  pass = std::isfinite(drift) && drift <= drift_tolerance;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; }) &&
         std::all_of(constants.begin(), constants.end(), [](const ConstantSequence& c) { return c.pass; });
}

void VerificationReport::add(std::string name, int level, double value, double tolerance, bool pass) {
  checks.push_back({std::move(name), level, value, tolerance, pass});
}

void VerificationReport::append(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  constants.insert(constants.end(), other.constants.begin(), other.constants.end());
}

void VerificationReport::write_csv(std::ostream& out) const {
  out << "check,level,value,tolerance,pass\n";
  for (const auto& c : checks) {
    out << c.name << ',' << c.level << ',' << format_double(c.value) << ',' << format_double(c.tolerance) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  for (const auto& s : constants) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << s.name << ',' << s.levels[i] << ',' << format_double(s.values[i]) << ",inf,true\n";
    }
    out << s.name << "_drift,-1," << format_double(s.drift) << ',' << format_double(s.drift_tolerance) << ','
        << (s.pass ? "true" : "false") << '\n';
  }
}

void VerificationReport::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw OutputError("cannot write " + path.string());
  }
  write_csv(out);
  if (!out) {
    throw OutputError("failed writing " + path.string());
  }
}

void VerificationReport::print(std::ostream& out) const {
  std::size_t width = 5;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& s : constants) width = std::max(width, s.name.size() + 6);
  const auto w = static_cast<int>(width);
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::left << std::setw(w) << "check" << "  level  " << std::setw(14) << "value" << std::setw(14)
      << "tolerance" << "result\n";
  out << std::setprecision(6);
  for (const auto& c : checks) {
    out << std::left << std::setw(w) << c.name << "  " << std::setw(5) << c.level << "  " << std::setw(14)
        << c.value << std::setw(14) << c.tolerance << (c.pass ? "pass" : "FAIL") << '\n';
  }
  for (const auto& s : constants) {
    out << std::left << std::setw(w) << s.name << "  levels";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << ' ' << s.levels[i] << ':' << s.values[i];
    }
    out << "  drift " << s.drift << " (<= " << s.drift_tolerance << ") " << (s.pass ? "pass" : "FAIL") << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

P0CapRT0 random_solenoidal(const OperatorSet& ops, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const VectorP0 w(*ops.mesh, random_vector(rng, 2 * ops.mesh->num_triangles()));
  return leray_project(ops, w, tight_cg());
}

VerificationReport check_identities(const Mesh& mesh, const CheckOptions& o) {
  const OperatorSet ops(mesh);
  const std::size_t nt = mesh.num_triangles();
  const std::size_t ne = mesh.num_edges();
  auto rng = make_rng(o.seed, o.level, 1);

  double adjoint = 0.0;
  double coercive = 0.0;
  double continuity = 0.0;
  double lap_identity = 0.0;
  double mass_diag = 0.0;
  double orthogonal = 0.0;
  double pythagoras = 0.0;

  for (int r = 0; r < o.samples; ++r) {
    const VectorP0 v(mesh, random_vector(rng, 2 * nt));
    const VectorP0 u(mesh, random_vector(rng, 2 * nt));
    const ScalarP1NC q(mesh, random_vector(rng, ne));
    const ScalarP1NC s(mesh, random_vector(rng, ne));

    const VectorP0 gq = gradient(q);
    const double lhs = l2_inner(v, gq);
    const double rhs = l2_inner(q, divergence(v));
    adjoint = std::max(adjoint, std::abs(lhs + rhs) / (l2_norm(v) * norm_1h(q)));

    const double hv = h_norm(v);
    const double hu = h_norm(u);
    const VectorP0 lap_v = laplacian_p0(v);
    coercive = std::max(coercive, std::abs(-l2_inner(lap_v, v) - hv * hv) / (hv * hv));
    continuity = std::max(continuity, -l2_inner(laplacian_p0(u), v) / (hu * hv));

    const double g2 = l2_inner(gq, gq);
    lap_identity = std::max(lap_identity, std::abs(-l2_inner(laplacian_p1nc(q), q) - g2) / g2);

    // Elementwise midpoint rule against the diagonal mass form.
    double elementwise = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      const auto& t = mesh.triangle(k);
      double local = 0.0;
      for (int e : t.edges) local += q[static_cast<std::size_t>(e)] * s[static_cast<std::size_t>(e)];
      elementwise += t.area / 3.0 * local;
    }
    const double diag = l2_inner(q, s);
    mass_diag = std::max(mass_diag, std::abs(elementwise - diag) / (l2_norm(q) * l2_norm(s)));

    const P0CapRT0 up = leray_project(ops, v, tight_cg());
    const double un = l2_norm(up.field());
    orthogonal = std::max(orthogonal, std::abs(l2_inner(up.field(), gq)) / (un * std::sqrt(g2)));
    const double w2 = l2_inner(v, v);
    const VectorP0 diff = v - up.field();
    pythagoras = std::max(pythagoras, std::abs(w2 - un * un - l2_inner(diff, diff)) / w2);
  }

  // Matrix form of the adjointness: G^T M_v + M_p D = 0.
  const SparseOperator GtM = ops.G.scale_rows(ops.mass_v).transpose();
  const SparseOperator MD = ops.D.scale_rows(ops.mass_p1nc);
  const double matrix_adjoint = add(1.0, GtM, 1.0, MD).max_abs() / GtM.max_abs();

  VerificationReport rep;
  const double tol = o.tolerance;
  rep.add("grad_div_adjointness", o.level, adjoint, tol, adjoint <= tol);
  rep.add("grad_div_adjointness_matrix", o.level, matrix_adjoint, 1e-12, matrix_adjoint <= 1e-12);
  rep.add("fv_laplacian_coercivity", o.level, coercive, tol, coercive <= tol);
  rep.add("fv_laplacian_continuity", o.level, continuity, 1.0 + tol, continuity <= 1.0 + tol);
  rep.add("p1nc_laplacian_identity", o.level, lap_identity, tol, lap_identity <= tol);
  rep.add("p1nc_mass_diagonal", o.level, mass_diag, 1e-13, mass_diag <= 1e-13);
  rep.add("leray_orthogonality", o.level, orthogonal, tol, orthogonal <= tol);
  rep.add("leray_pythagoras", o.level, pythagoras, tol, pythagoras <= tol);
  return rep;
}

namespace {

/// sup over v, w of |w^T C v| / (||v||_h ||w||_h): power iteration on
/// C^T L^-1 C v = s^2 L v, warm-started solves.
double convection_sup(const SparseOperator& C, const SparseOperator& L, std::mt19937_64& rng) {
  SolverConfig cfg = tight_cg();
  cfg.rtol = 1e-12;
  std::vector<double> v = random_vector(rng, L.rows());
  std::vector<double> y;
  double s2 = 0.0;
  for (int it = 0; it < 300; ++it) {
    const std::vector<double> Cv = C.apply(v);
    y = solve(L, Cv, cfg, {}, y).x;
    const double next = dot(Cv, y) / dot(v, L.apply(v));
    v = solve(L, C.apply_transpose(y), cfg, {}, v).x;
    const double n = norm2(v);
    for (double& x : v) x /= n;
    if (it > 5 && std::abs(next - s2) <= 1e-9 * next) {
      return std::sqrt(next);
    }
    s2 = next;
  }
  return std::sqrt(s2);
}

}  // namespace

ConvectionCheck check_convection(const Mesh& mesh, const CheckOptions& o) {
  const OperatorSet ops(mesh);
  const std::size_t nt = mesh.num_triangles();
  auto rng = make_rng(o.seed, o.level, 2);

  double positivity = kInf;
  double constant_transport = 0.0;
  for (int r = 0; r < o.samples; ++r) {
    const P0CapRT0 u = random_solenoidal(ops, rng());
    const VectorP0 v(mesh, random_vector(rng, 2 * nt));
    const double un = l2_norm(u.field());
    const double hv = h_norm(v);
    positivity = std::min(positivity, trilinear_form(u, v, v) / (un * hv * hv));

    const auto cvec = random_vector(rng, 2);
    VectorP0 c(mesh);
    for (std::size_t k = 0; k < nt; ++k) c.set(k, {cvec[0], cvec[1]});
    const VectorRT0 flux = u.fluxes();
    double flux_scale = 0.0;
    for (int s : mesh.interior_edges()) {
      flux_scale += 2.0 * mesh.edge(static_cast<std::size_t>(s)).length * std::abs(flux[static_cast<std::size_t>(s)]);
    }
    const double c2 = cvec[0] * cvec[0] + cvec[1] * cvec[1];
    if (flux_scale > 0.0) {
      constant_transport = std::max(constant_transport, std::abs(trilinear_form(u, c, c)) / (flux_scale * c2));
    }
  }

  // Transporting fields: two smooth ones and two noisy ones. For each, the
  // supremum over v and w is exact up to the power-iteration tolerance.
  std::vector<P0CapRT0> transport;
  transport.push_back(leray_project(ops, project_p0(mesh, VectorFunction(bubble::velocity)), tight_cg()));
  transport.push_back(leray_project(ops, project_p0(mesh, VectorFunction(manufactured::velocity)), tight_cg()));
  transport.push_back(random_solenoidal(ops, rng()));
  transport.push_back(random_solenoidal(ops, rng()));
  double stability = 0.0;
  for (const P0CapRT0& u : transport) {
    stability = std::max(stability, convection_sup(convection_matrix(u), ops.L, rng) / l2_norm(u.field()));
  }

  ConvectionCheck out;
  out.stability_constant = stability;
  out.report.add("upwind_positivity", o.level, positivity, -o.tolerance, positivity >= -o.tolerance);
  out.report.add("upwind_constant_transport", o.level, constant_transport, 1e-12, constant_transport <= 1e-12);
  out.report.add("convection_stability_constant", o.level, stability, kInf, std::isfinite(stability));
  return out;
}

namespace {

/// Applies v -> M^{1/2} K^{-1} M^{1/2} v, or the plain congruence when
/// `inverse` is false, for a per-component SPD matrix K and diagonal M.
class CongruenceMap {
 public:
  CongruenceMap(const SparseOperator& K, std::vector<double> mass, bool inverse, std::span<const double> constraint)
      : K_(K), sqrt_m_(std::move(mass)), inverse_(inverse), constraint_(constraint) {
    for (double& m : sqrt_m_) m = std::sqrt(m);
    solver_.method = SolverMethod::cg;
    solver_.rtol = 1e-13;
    solver_.atol = 1e-300;
  }

  void operator()(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = x.size();
    std::vector<double> t(n);
    if (inverse_) {
      for (std::size_t i = 0; i < n; ++i) t[i] = sqrt_m_[i] * x[i];
      const SolveResult res = solve(K_, t, solver_, constraint_);
      for (std::size_t i = 0; i < n; ++i) y[i] = sqrt_m_[i] * res.x[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) t[i] = x[i] / sqrt_m_[i];
      K_.apply(t, y);
      for (std::size_t i = 0; i < n; ++i) y[i] /= sqrt_m_[i];
    }
  }

 private:
  const SparseOperator& K_;
  std::vector<double> sqrt_m_;
  bool inverse_;
  std::span<const double> constraint_;
  SolverConfig solver_;
};

std::vector<double> normalized_sqrt(std::span<const double> m) {
  std::vector<double> e(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) e[i] = std::sqrt(m[i]);
  const double n = norm2(e);
  for (double& x : e) x /= n;
  return e;
}

}  // namespace

InfSupResult estimate_infsup(const Mesh& mesh, const InfSupOptions& options) {
  const OperatorSet ops(mesh);
  const std::size_t nt = mesh.num_triangles();
  const std::size_t ne = mesh.num_edges();
  const auto& mp = ops.mass_p1nc;
  const std::vector<double> e = normalized_sqrt(mp);
  InfSupResult out;
  std::vector<double> mode_t(ne);

  if (ne <= options.dense_limit && !options.force_iterative) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nt));
    {
      const auto off = ops.L.row_offsets();
      const auto ids = ops.L.col_ids();
      const auto vals = ops.L.values();
      for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t p = off[i]; p < off[i + 1]; ++p) L(static_cast<Eigen::Index>(i), ids[p]) = vals[p];
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(L);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ne), static_cast<Eigen::Index>(ne));
    const auto off = ops.G.row_offsets();
    const auto ids = ops.G.col_ids();
    const auto vals = ops.G.values();
    for (int c = 0; c < 2; ++c) {
      Eigen::MatrixXd MG = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(ne));
      for (std::size_t k = 0; k < nt; ++k) {
        const std::size_t row = static_cast<std::size_t>(c) * nt + k;
        for (std::size_t p = off[row]; p < off[row + 1]; ++p) {
          MG(static_cast<Eigen::Index>(k), ids[p]) = ops.mass_p0[k] * vals[p];
        }
      }
      S += MG.transpose() * llt.solve(MG);
    }
    Eigen::VectorXd inv_sqrt(static_cast<Eigen::Index>(ne));
    Eigen::VectorXd ev(static_cast<Eigen::Index>(ne));
    for (std::size_t i = 0; i < ne; ++i) {
      inv_sqrt(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(mp[i]);
      ev(static_cast<Eigen::Index>(i)) = e[i];
    }
    Eigen::MatrixXd T = inv_sqrt.asDiagonal() * S * inv_sqrt.asDiagonal();
    T = 0.5 * (T + T.transpose()).eval();
    // Lift the constant mode above the spectrum.
    const double shift = 10.0 * (T.diagonal().cwiseAbs().maxCoeff() * static_cast<double>(ne) + 1.0);
    T += shift * ev * ev.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    out.beta = std::sqrt(std::max(es.eigenvalues()(0), 0.0));
    for (std::size_t i = 0; i < ne; ++i) mode_t[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
  } else {
    SolverConfig inner;
    inner.method = SolverMethod::cg;
    inner.rtol = 1e-12;
    inner.atol = 1e-300;
    const LinearMap op = [&](std::span<const double> x, std::span<double> y) {
      std::vector<double> q(ne);
      for (std::size_t i = 0; i < ne; ++i) q[i] = x[i] / std::sqrt(mp[i]);
      const std::vector<double> g = ops.G.apply(q);
      std::vector<double> z(2 * nt);
      for (int c = 0; c < 2; ++c) {
        std::vector<double> b(nt);
        for (std::size_t k = 0; k < nt; ++k) b[k] = ops.mass_p0[k] * g[static_cast<std::size_t>(c) * nt + k];
        const SolveResult res = solve(ops.L, b, inner);
        for (std::size_t k = 0; k < nt; ++k) z[static_cast<std::size_t>(c) * nt + k] = ops.mass_p0[k] * res.x[k];
      }
      const std::vector<double> s = ops.G.apply_transpose(z);
      for (std::size_t i = 0; i < ne; ++i) y[i] = s[i] / std::sqrt(mp[i]);
    };
    LanczosOptions lo;
    lo.tol = options.lanczos_tol;
    lo.seed = options.seed;
    lo.max_steps = 400;
    const std::vector<std::vector<double>> deflate{e};
    const EigenPair pair = lanczos(op, ne, Extremal::smallest, lo, deflate);
    out.iterative = true;
    out.lanczos_steps = pair.steps;
    out.beta = std::sqrt(std::max(pair.value, 0.0));
    mode_t = pair.vector;
  }

  ScalarP1NC q(mesh);
  for (std::size_t i = 0; i < ne; ++i) q[i] = mode_t[i] / std::sqrt(mp[i]);
  q = mean_zero(q);
  const double qn = l2_norm(q);
  q *= 1.0 / qn;
  out.pressure_mode = q.data();
  const VectorP0 gq = gradient(q);
  const double g2 = l2_inner(gq, gq);
  const double gh = h_norm(gq);
  out.gradient_candidate = gh > 0.0 ? g2 / gh : 0.0;
  out.gradient_candidate_ratio = out.gradient_candidate / (mesh.h() * norm_1h(q));
  return out;
}

ConvectionPair default_convection_pair() {
  ConvectionPair p;
  p.u = bubble::velocity;
  p.v = [](const Vec2& x) {
    return Vec2{std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y), 0.0};
  };
  p.exact = [](const Vec2& x) {
    const double pi = std::numbers::pi;
    const Vec2 u = bubble::velocity(x);
    const Vec2 grad{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    return Vec2{dot(u, grad), 0.0};
  };
  return p;
}

double consistency_error(const Mesh& mesh, const ConvectionPair& pair) {
  const VectorRT0 flux = project_rt0(mesh, pair.u, 9);
  const VectorP0 vt = project_p0_pointvalue(mesh, pair.v);
  std::vector<double> bh = apply_componentwise(convection_matrix(mesh, flux), vt.values());
  const VectorP0 exact = project_p0(mesh, pair.exact);
  const std::size_t nt = mesh.num_triangles();
  VectorP0 diff(mesh);
  for (std::size_t i = 0; i < 2 * nt; ++i) {
    diff[i] = exact[i] - bh[i] / mesh.triangle(i % nt).area;
  }
  return dual_norm(diff);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope needs at least two matching points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      return 0.0;
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RateResult consistency_rate(int levels, int first_level, const ConvectionPair& pair) {
  if (levels < 3) {
    throw std::invalid_argument("a consistency rate needs at least three levels");
  }
  RateResult r;
  for (int l = first_level; l < first_level + levels; ++l) {
    const Mesh mesh = acute_square_mesh(l);
    r.levels.push_back(l);
    r.h.push_back(mesh.h());
    r.errors.push_back(consistency_error(mesh, pair));
  }
  r.rate = log_log_slope(r.h, r.errors);
  return r;
}

FunctionalConstants functional_constants(const Mesh& mesh, std::uint64_t seed) {
  const SparseOperator L = fv_laplacian_matrix(mesh);
  const SparseOperator A = weak_laplacian_matrix(mesh);
  const std::vector<double> m = p0_mass(mesh);
  const std::vector<double> mp = p1nc_mass(mesh);
  LanczosOptions lo;
  lo.tol = 1e-12;
  lo.seed = seed;
  lo.max_steps = 400;

  FunctionalConstants c;
  const EigenPair inv_small = lanczos(CongruenceMap(L, m, true, {}), m.size(), Extremal::largest, lo);
  c.poincare_p0 = std::sqrt(inv_small.value);
  const EigenPair large = lanczos(CongruenceMap(L, m, false, {}), m.size(), Extremal::largest, lo);
  c.inverse_p0 = mesh.h() * std::sqrt(large.value);
  const std::vector<std::vector<double>> deflate{normalized_sqrt(mp)};
  const EigenPair p1 = lanczos(CongruenceMap(A, mp, true, mp), mp.size(), Extremal::largest, lo, deflate);
  c.poincare_p1nc = std::sqrt(p1.value);
  return c;
}

std::vector<ConstantSequence> poincare_inverse_constants(const std::vector<int>& levels, std::uint64_t seed) {
  ConstantSequence p0 = make_sequence("poincare_p0");
  ConstantSequence inv = make_sequence("inverse_p0");
  ConstantSequence p1 = make_sequence("poincare_p1nc");
  for (int l : levels) {
    const FunctionalConstants c = functional_constants(acute_square_mesh(l), seed);
    for (auto* s : {&p0, &inv, &p1}) s->levels.push_back(l);
    p0.values.push_back(c.poincare_p0);
    inv.values.push_back(c.inverse_p0);
    p1.values.push_back(c.poincare_p1nc);
  }
  for (auto* s : {&p0, &inv, &p1}) s->finalize();
  return {p0, inv, p1};
}

namespace {

/// max_m seq[m] / seq[ref] over m >= ref, 0 when the sequence is identically zero there.
double growth(const std::vector<double>& seq, std::size_t ref) {
  double worst = 0.0;
  for (std::size_t m = ref; m < seq.size(); ++m) {
    if (seq[ref] > 0.0) {
      worst = std::max(worst, seq[m] / seq[ref]);
    } else if (seq[m] > 0.0) {
      return kInf;
    }
  }
  return worst;
}

}  // namespace

VerificationReport stability_monitors(const Trajectory& trajectory, int level, const MonitorOptions& o) {
  VerificationReport rep;
  const auto& steps = trajectory.steps;
  if (steps.empty()) {
    rep.add("monitor_steps", level, 0.0, 1.0, false);
    return rep;
  }
  const std::size_t N = steps.size();
  const std::size_t ref = std::max<std::size_t>(N / 10, 1) - 1;
  std::vector<double> energy, increments, pressure_avg;
  for (const auto& s : steps) {
    energy.push_back(s.energy);
    increments.push_back(s.increment);
    pressure_avg.push_back(s.t > 0.0 ? s.pressure_sum / s.t : 0.0);
  }
  const double ge = growth(energy, ref);
  const double gi = growth(increments, ref);
  const double gp = growth(pressure_avg, ref);
  rep.add("energy_bounded", level, ge, o.factor, ge <= o.factor);
  rep.add("increments_bounded", level, gi, o.factor, gi <= o.factor);
  rep.add("pressure_sum_bounded", level, gp, o.factor, gp <= o.factor);
  double div = 0.0, orth = 0.0, pyth = 0.0, ident = 0.0;
  for (const auto& s : steps) {
    if (s.u_norm > 0.0) {
      div = std::max(div, s.div_residual / s.u_norm);
    }
    orth = std::max(orth, s.orthogonality);
    pyth = std::max(pyth, s.pythagoras);
    ident = std::max(ident, s.energy_identity);
  }
  const double div_tol = 10.0 * o.solver_rtol;
  rep.add("divergence_after_projection", level, div, div_tol, div <= div_tol);
  rep.add("projection_orthogonality", level, orth, o.identity_tolerance, orth <= o.identity_tolerance);
  rep.add("projection_pythagoras", level, pyth, o.identity_tolerance, pyth <= o.identity_tolerance);
  rep.add("momentum_energy_identity", level, ident, o.energy_tolerance, ident <= o.energy_tolerance);
  rep.add("init_u0_norm", level, trajectory.init.norm_u0, kInf, true);
  rep.add("init_u1_norm", level, trajectory.init.norm_u1, kInf, true);
  rep.add("init_k_grad_p1", level, trajectory.init.k_grad_p1, kInf, true);
  rep.add("init_h1_sum", level, trajectory.init.h1_sum(), kInf, std::isfinite(trajectory.init.h1_sum()));
  rep.add("init_leray_defect", level, trajectory.init.leray_defect, kInf, true);
  return rep;
}

VerificationReport verify_all(const VerifyOptions& options) {
  VerificationReport rep;
  ConstantSequence conv = make_sequence("convection_stability_constant");
  ConstantSequence beta = make_sequence("infsup_constant", 1.2);
  for (int l : options.levels) {
    const Mesh mesh = acute_square_mesh(l);
    const MeshQualityReport q = validate_mesh(mesh);
    rep.add("mesh_admissible", l, q.max_angle, std::numbers::pi / 2, q.admissible);
    CheckOptions co;
    co.level = l;
    co.seed = options.seed;
    co.samples = options.samples;
    rep.append(check_identities(mesh, co));
    const ConvectionCheck cc = check_convection(mesh, co);
    rep.append(cc.report);
    conv.levels.push_back(l);
    conv.values.push_back(cc.stability_constant);

    const InfSupResult is = estimate_infsup(mesh);
    rep.add("infsup_constant", l, is.beta, 0.01, is.beta > 0.01);
    const double sup_value = is.beta;  // |q| = 1
    rep.add("gradient_candidate_below_sup", l, is.gradient_candidate / sup_value, 1.0 + 1e-8,
            is.gradient_candidate <= sup_value * (1.0 + 1e-8));
    rep.add("gradient_candidate_ratio", l, is.gradient_candidate_ratio, 0.0, is.gradient_candidate_ratio > 0.0);
    beta.levels.push_back(l);
    beta.values.push_back(is.beta);
  }
  conv.finalize();
  beta.finalize();
  rep.constants.push_back(beta);
  rep.constants.push_back(conv);

  if (options.levels.size() >= 3) {
    const int first = *std::min_element(options.levels.begin(), options.levels.end());
    const RateResult rate = consistency_rate(static_cast<int>(options.levels.size()), first);
    for (std::size_t i = 0; i < rate.levels.size(); ++i) {
      rep.add("convection_consistency_error", rate.levels[i], rate.errors[i], kInf, std::isfinite(rate.errors[i]));
    }
    rep.add("convection_consistency_rate", -1, rate.rate, 0.8, rate.rate >= 0.8);
  }
  for (auto& s : poincare_inverse_constants(options.levels)) rep.constants.push_back(s);
  return rep;
}

}  // namespace fvproj
