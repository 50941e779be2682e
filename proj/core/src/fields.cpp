#include "fvproj/fields.hpp"

#include <algorithm>
#include <cmath>

#include "fvproj/linalg.hpp"
#include "fvproj/operators.hpp"
#include "fvproj/parallel.hpp"
#include "fvproj/quadrature.hpp"

namespace fvproj {

std::size_t dof_count(const Mesh& mesh, Space space) {
  switch (space) {
    case Space::p0_scalar:
      return mesh.num_triangles();
    case Space::p0_vector:
      return 2 * mesh.num_triangles();
    case Space::p1nc:
    case Space::rt0:
      return mesh.num_edges();
  }
  return 0;
}

double max_normal_jump(const VectorP0& v) {
  const Mesh& mesh = v.mesh();
  double jump = 0.0;
  for (const auto& e : mesh.edges()) {
    Vec2 d = v.at(static_cast<std::size_t>(e.owner));
    if (!e.is_boundary()) {
      d = v.at(static_cast<std::size_t>(e.neighbor)) - d;
    }
    jump = std::max(jump, std::abs(dot(d, e.normal)));
  }
  return jump;
}

double max_abs(const VectorP0& v) {
  double m = 0.0;
  for (std::size_t k = 0; k < v.mesh().num_triangles(); ++k) {
    m = std::max(m, norm(v.at(k)));
  }
  return m;
}

P0CapRT0 P0CapRT0::certify(VectorP0 field, double relative_tolerance) {
  const double jump = fvproj::max_normal_jump(field);
  const double scale = max_abs(field);
  if (!(jump <= relative_tolerance * scale)) {
    throw CertificateError("normal jump " + std::to_string(jump) + " exceeds " +
                           std::to_string(relative_tolerance) + " * max|v| = " +
                           std::to_string(relative_tolerance * scale));
  }
  return P0CapRT0(std::move(field), jump, relative_tolerance);
}

P0CapRT0 P0CapRT0::zero(const Mesh& mesh) { return P0CapRT0(VectorP0(mesh), 0.0, kCertificateTolerance); }

VectorRT0 P0CapRT0::fluxes() const {
  const Mesh& mesh = field_.mesh();
  VectorRT0 f(mesh);
  for (int s : mesh.interior_edges()) {
    const auto& e = mesh.edge(static_cast<std::size_t>(s));
    const Vec2 sum = field_.at(static_cast<std::size_t>(e.owner)) + field_.at(static_cast<std::size_t>(e.neighbor));
    f[static_cast<std::size_t>(s)] = 0.5 * dot(sum, e.normal);
  }
  return f;
}

P0CapRT0 P0CapRT0::extrapolate(const P0CapRT0& a, const P0CapRT0& b) {
  VectorP0 v = 2.0 * a.field_ - b.field_;
  const double jump = fvproj::max_normal_jump(v);
  return P0CapRT0(std::move(v), jump, std::max(a.tolerance_, b.tolerance_));
}

ScalarP0 project_p0(const Mesh& mesh, const ScalarFunction& f, int quad_order) {
  const auto& rule = triangle_rule(quad_order);
  const auto verts = mesh.vertices();
  ScalarP0 out(mesh);
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangle(k);
    const auto& a = verts[static_cast<std::size_t>(t.vertices[0])];
    const auto& b = verts[static_cast<std::size_t>(t.vertices[1])];
    const auto& c = verts[static_cast<std::size_t>(t.vertices[2])];
    out[k] = integrate_triangle(a, b, c, rule, f) / t.area;
  }
  return out;
}

VectorP0 project_p0(const Mesh& mesh, const VectorFunction& f, int quad_order) {
  const auto& rule = triangle_rule(quad_order);
  const auto verts = mesh.vertices();
  VectorP0 out(mesh);
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangle(k);
    const auto& a = verts[static_cast<std::size_t>(t.vertices[0])];
    const auto& b = verts[static_cast<std::size_t>(t.vertices[1])];
    const auto& c = verts[static_cast<std::size_t>(t.vertices[2])];
    out.set(k, (1.0 / t.area) * integrate_triangle(a, b, c, rule, f));
  }
  return out;
}

VectorP0 project_p0_pointvalue(const Mesh& mesh, const VectorFunction& f) {
  VectorP0 out(mesh);
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    out.set(k, f(mesh.triangle(k).circumcenter));
  }
  return out;
}

ScalarP1NC project_p1nc(const Mesh& mesh, const ScalarFunction& q, int quad_order) {
  const auto& rule = segment_rule(quad_order);
  const auto verts = mesh.vertices();
  ScalarP1NC out(mesh);
  for (std::size_t s = 0; s < mesh.num_edges(); ++s) {
    const auto& e = mesh.edge(s);
    out[s] = average_segment(verts[static_cast<std::size_t>(e.vertices[0])],
                             verts[static_cast<std::size_t>(e.vertices[1])], rule, q);
  }
  return out;
}

VectorRT0 project_rt0(const Mesh& mesh, const VectorFunction& u, int quad_order) {
  const auto& rule = segment_rule(quad_order);
  const auto verts = mesh.vertices();
  VectorRT0 out(mesh);
  for (int s : mesh.interior_edges()) {
    const auto& e = mesh.edge(static_cast<std::size_t>(s));
    out[static_cast<std::size_t>(s)] =
        average_segment(verts[static_cast<std::size_t>(e.vertices[0])], verts[static_cast<std::size_t>(e.vertices[1])],
                        rule, [&](const Vec2& x) { return dot(u(x), e.normal); });
  }
  return out;
}

double evaluate_p1nc(const ScalarP1NC& q, std::size_t k, const Vec2& x) {
  const Mesh& mesh = q.mesh();
  const auto& t = mesh.triangle(k);
  const auto verts = mesh.vertices();
  const Vec2& a = verts[static_cast<std::size_t>(t.vertices[0])];
  const Vec2& b = verts[static_cast<std::size_t>(t.vertices[1])];
  const Vec2& c = verts[static_cast<std::size_t>(t.vertices[2])];
  const double twice = cross(b - a, c - a);
  const std::array<double, 3> lambda{cross(b - x, c - x) / twice, cross(c - x, a - x) / twice,
                                     cross(a - x, b - x) / twice};
  double value = 0.0;
  for (int i = 0; i < 3; ++i) {
    value += q[static_cast<std::size_t>(t.edges[i])] * (1.0 - 2.0 * lambda[i]);
  }
  return value;
}

std::vector<double> p0_mass(const Mesh& mesh) {
  std::vector<double> m(mesh.num_triangles());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = mesh.triangle(k).area;
  return m;
}

std::vector<double> p1nc_mass(const Mesh& mesh) {
  std::vector<double> m(mesh.num_edges());
  for (std::size_t s = 0; s < m.size(); ++s) {
    const auto& e = mesh.edge(s);
    double a = mesh.triangle(static_cast<std::size_t>(e.owner)).area;
    if (!e.is_boundary()) {
      a += mesh.triangle(static_cast<std::size_t>(e.neighbor)).area;
    }
    m[s] = a / 3.0;
  }
  return m;
}

namespace {

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  std::vector<double> prod(a.size());
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = w[i % n] * a[i] * b[i];
  return pairwise_sum(prod.data(), prod.size());
}

}  // namespace

double l2_inner(const ScalarP0& a, const ScalarP0& b) {
  a.check_same_mesh(b);
  return weighted_dot(p0_mass(a.mesh()), a.values(), b.values());
}

double l2_inner(const VectorP0& a, const VectorP0& b) {
  a.check_same_mesh(b);
  return weighted_dot(p0_mass(a.mesh()), a.values(), b.values());
}

double l2_inner(const ScalarP1NC& a, const ScalarP1NC& b) {
  a.check_same_mesh(b);
  return weighted_dot(p1nc_mass(a.mesh()), a.values(), b.values());
}

namespace {

double h_norm_squared(const Mesh& mesh, std::span<const double> v) {
  std::vector<double> terms(mesh.num_edges());
  for (std::size_t s = 0; s < mesh.num_edges(); ++s) {
    const auto& e = mesh.edge(s);
    double d = v[static_cast<std::size_t>(e.owner)];
    if (!e.is_boundary()) {
      d -= v[static_cast<std::size_t>(e.neighbor)];
    }
    terms[s] = e.transmissibility * d * d;
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace

double h_norm(const ScalarP0& v) { return std::sqrt(h_norm_squared(v.mesh(), v.values())); }

double h_norm(const VectorP0& v) {
  return std::sqrt(h_norm_squared(v.mesh(), v.component(0)) + h_norm_squared(v.mesh(), v.component(1)));
}

double dual_norm(const VectorP0& v) {
  SolverConfig cfg;
  cfg.method = SolverMethod::cg;
  cfg.rtol = 1e-13;
  cfg.atol = 1e-300;
  return dual_norm(v, cfg);
}

double dual_norm(const VectorP0& v, const SolverConfig& config) {
  const Mesh& mesh = v.mesh();
  const SparseOperator L = fv_laplacian_matrix(mesh);
  const std::vector<double> m = p0_mass(mesh);
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto vc = v.component(c);
    std::vector<double> rhs(vc.size());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = m[k] * vc[k];
    if (norm2(rhs) == 0.0) {
      continue;
    }
    const std::vector<double> w = solve_or_throw(L, rhs, config);
    total += dot(rhs, w);
  }
  return std::sqrt(std::max(total, 0.0));
}

double norm_1h(const ScalarP1NC& q) {
  const VectorP0 g = gradient(q);
  return std::sqrt(l2_inner(q, q) + l2_inner(g, g));
}

double mean(const ScalarP1NC& q) {
  const std::vector<double> m = p1nc_mass(q.mesh());
  return dot(m, q.values()) / pairwise_sum(m.data(), m.size());
}

ScalarP1NC mean_zero(const ScalarP1NC& q) {
  ScalarP1NC out = q;
  remove_weighted_mean(out.values(), p1nc_mass(q.mesh()));
  return out;
}

double p1nc_interpolation_error(const Mesh& mesh, const ScalarFunction& q, int quad_order) {
  const ScalarP1NC pq = project_p1nc(mesh, q);
  const auto& rule = triangle_rule(quad_order);
  const auto verts = mesh.vertices();
  std::vector<double> local(mesh.num_triangles());
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangle(k);
    local[k] = integrate_triangle(verts[static_cast<std::size_t>(t.vertices[0])],
                                  verts[static_cast<std::size_t>(t.vertices[1])],
                                  verts[static_cast<std::size_t>(t.vertices[2])], rule, [&](const Vec2& x) {
                                    const double d = q(x) - evaluate_p1nc(pq, k, x);
                                    return d * d;
                                  });
  }
  return std::sqrt(pairwise_sum(local.data(), local.size()));
}

}  // namespace fvproj
