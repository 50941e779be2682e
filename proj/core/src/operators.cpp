#include "fvproj/operators.hpp"

#include <algorithm>
#include <cmath>

namespace fvproj {

SparseOperator gradient_matrix(const Mesh& mesh) {
  const std::size_t nt = mesh.num_triangles();
  TripletBuilder tb(2 * nt, mesh.num_edges());
  tb.reserve(6 * nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const auto& t = mesh.triangle(k);
    for (int i = 0; i < 3; ++i) {
      const auto& e = mesh.edge(static_cast<std::size_t>(t.edges[i]));
      const Vec2 n = mesh.outward_normal(k, i);
      const double s = e.length / t.area;
      tb.add(k, static_cast<std::size_t>(t.edges[i]), s * n.x);
      tb.add(nt + k, static_cast<std::size_t>(t.edges[i]), s * n.y);
    }
  }
  SparseOperator G = tb.build();
  G.domain = Space::p1nc;
  G.codomain = Space::p0_vector;
  return G;
}

SparseOperator divergence_matrix(const Mesh& mesh) {
  const std::size_t nt = mesh.num_triangles();
  TripletBuilder tb(mesh.num_edges(), 2 * nt);
  tb.reserve(4 * mesh.num_edges());
  for (std::size_t s = 0; s < mesh.num_edges(); ++s) {
    const auto& e = mesh.edge(s);
    const auto K = static_cast<std::size_t>(e.owner);
    if (e.is_boundary()) {
      const double w = 3.0 * e.length / mesh.triangle(K).area;
      tb.add(s, K, -w * e.normal.x);
      tb.add(s, nt + K, -w * e.normal.y);
    } else {
      const auto L = static_cast<std::size_t>(e.neighbor);
      const double w = 3.0 * e.length / (mesh.triangle(K).area + mesh.triangle(L).area);
      tb.add(s, K, -w * e.normal.x);
      tb.add(s, nt + K, -w * e.normal.y);
      tb.add(s, L, w * e.normal.x);
      tb.add(s, nt + L, w * e.normal.y);
    }
  }
  SparseOperator D = tb.build();
  D.domain = Space::p0_vector;
  D.codomain = Space::p1nc;
  return D;
}

SparseOperator weak_laplacian_matrix(const Mesh& mesh) {
  const SparseOperator G = gradient_matrix(mesh);
  std::vector<double> mv(2 * mesh.num_triangles());
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    mv[k] = mv[mesh.num_triangles() + k] = mesh.triangle(k).area;
  }
  SparseOperator A = multiply(G.transpose(), G.scale_rows(mv));
  A.domain = Space::p1nc;
  A.codomain = Space::p1nc;
  return A;
}

SparseOperator fv_laplacian_matrix(const Mesh& mesh) {
  TripletBuilder tb(mesh.num_triangles(), mesh.num_triangles());
  tb.reserve(4 * mesh.num_edges());
  for (const auto& e : mesh.edges()) {
    const auto K = static_cast<std::size_t>(e.owner);
    const double tau = e.transmissibility;
    tb.add(K, K, tau);
    if (!e.is_boundary()) {
      const auto L = static_cast<std::size_t>(e.neighbor);
      tb.add(L, L, tau);
      tb.add(K, L, -tau);
      tb.add(L, K, -tau);
    }
  }
  SparseOperator L = tb.build();
  L.domain = Space::p0_scalar;
  L.codomain = Space::p0_scalar;
  return L;
}

SparseOperator convection_matrix(const Mesh& mesh, const VectorRT0& flux) {
  const std::size_t nt = mesh.num_triangles();
  TripletBuilder tb(nt, nt);
  tb.reserve(4 * mesh.interior_edges().size());
  for (int s : mesh.interior_edges()) {
    const auto& e = mesh.edge(static_cast<std::size_t>(s));
    const auto K = static_cast<std::size_t>(e.owner);
    const auto L = static_cast<std::size_t>(e.neighbor);
    const double F = flux[static_cast<std::size_t>(s)];
    const double plus = std::max(F, 0.0);
    const double minus = std::min(F, 0.0);
    // Flux out of L is -F, whose positive part is -minus and negative part -plus.
    tb.add(K, K, e.length * plus);
    tb.add(K, L, e.length * minus);
    tb.add(L, L, -e.length * minus);
    tb.add(L, K, -e.length * plus);
  }
  SparseOperator C = tb.build();
  C.domain = Space::p0_scalar;
  C.codomain = Space::p0_scalar;
  return C;
}

SparseOperator convection_matrix(const P0CapRT0& u) { return convection_matrix(u.mesh(), u.fluxes()); }

std::vector<double> apply_componentwise(const SparseOperator& A, std::span<const double> blocked) {
  const std::size_t n = A.rows();
  if (A.cols() != n || blocked.size() != 2 * n) {
    throw DimensionError("componentwise application size mismatch");
  }
  std::vector<double> out(2 * n);
  A.apply(blocked.subspan(0, n), std::span<double>(out).subspan(0, n));
  A.apply(blocked.subspan(n, n), std::span<double>(out).subspan(n, n));
  return out;
}

VectorP0 gradient(const ScalarP1NC& q) {
  return VectorP0(q.mesh(), gradient_matrix(q.mesh()).apply(q.values()));
}

ScalarP1NC divergence(const VectorP0& v) {
  return ScalarP1NC(v.mesh(), divergence_matrix(v.mesh()).apply(v.values()));
}

ScalarP1NC laplacian_p1nc(const ScalarP1NC& q) { return divergence(gradient(q)); }

VectorP0 laplacian_p0(const VectorP0& v) {
  const Mesh& mesh = v.mesh();
  std::vector<double> out = apply_componentwise(fv_laplacian_matrix(mesh), v.values());
  const std::size_t nt = mesh.num_triangles();
  for (std::size_t k = 0; k < nt; ++k) {
    const double a = mesh.triangle(k).area;
    out[k] = -out[k] / a;
    out[nt + k] = -out[nt + k] / a;
  }
  return VectorP0(mesh, std::move(out));
}

VectorP0 upwind_convection(const P0CapRT0& u, const VectorP0& v) {
  u.field().check_same_mesh(v);
  const Mesh& mesh = v.mesh();
  std::vector<double> out = apply_componentwise(convection_matrix(u), v.values());
  const std::size_t nt = mesh.num_triangles();
  for (std::size_t k = 0; k < nt; ++k) {
    const double a = mesh.triangle(k).area;
    out[k] /= a;
    out[nt + k] /= a;
  }
  return VectorP0(mesh, std::move(out));
}

double trilinear_form(const P0CapRT0& u, const VectorP0& v, const VectorP0& w) {
  v.check_same_mesh(w);
  const std::vector<double> cv = apply_componentwise(convection_matrix(u), v.values());
  return dot(cv, w.values());
}

OperatorSet::OperatorSet(const Mesh& m)
    : mesh(&m),
      G(gradient_matrix(m)),
      D(divergence_matrix(m)),
      L(fv_laplacian_matrix(m)),
      mass_p0(p0_mass(m)),
      mass_p1nc(p1nc_mass(m)) {
  mass_v.resize(2 * mass_p0.size());
  std::copy(mass_p0.begin(), mass_p0.end(), mass_v.begin());
  std::copy(mass_p0.begin(), mass_p0.end(), mass_v.begin() + static_cast<std::ptrdiff_t>(mass_p0.size()));
  A = multiply(G.transpose(), G.scale_rows(mass_v));
  A.domain = Space::p1nc;
  A.codomain = Space::p1nc;
}

void export_matrix(const SparseOperator& A, const std::filesystem::path& path) { A.export_coordinates(path); }

}  // namespace fvproj
