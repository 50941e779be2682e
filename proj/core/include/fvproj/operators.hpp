#pragma once

#include <filesystem>
#include <vector>

#include "fvproj/fields.hpp"
#include "fvproj/sparse.hpp"

namespace fvproj {

/// Broken gradient of P1NC functions: (2 nt) x ne, rows component-blocked.
/// Entry (c*nt + K, sigma) = |sigma| n_{K,sigma,c} / |K| with n outward from K.
SparseOperator gradient_matrix(const Mesh& mesh);

/// Discrete divergence P0^2 -> P1NC: ne x (2 nt). Interior edges carry
/// 3|sigma| / (|K| + |L|) (v_L - v_K) . n_{K,sigma}; boundary edges carry
/// -3|sigma| / |K| v_K . n_{K,sigma}.
SparseOperator divergence_matrix(const Mesh& mesh);

/// Weak P1NC Laplacian A = G^T M_v G, so (A q) . r = (grad_h q, grad_h r).
SparseOperator weak_laplacian_matrix(const Mesh& mesh);

/// Two-point-flux Laplacian with homogeneous Dirichlet data, scaled by |K|:
/// L = -|K| lap~_h. Acts on one scalar component; symmetric positive definite.
SparseOperator fv_laplacian_matrix(const Mesh& mesh);

/// Upwind convection matrix for one component, scaled by |K|: row K holds
/// sum_sigma |sigma| (F+ v_K + F- v_L) with F the flux out of K. Boundary edges
/// contribute nothing.
SparseOperator convection_matrix(const P0CapRT0& u);
/// Same, from raw edge fluxes (owner-normal convention).
SparseOperator convection_matrix(const Mesh& mesh, const VectorRT0& flux);

VectorP0 gradient(const ScalarP1NC& q);
ScalarP1NC divergence(const VectorP0& v);
/// Pointwise composition div_h(grad_h q).
ScalarP1NC laplacian_p1nc(const ScalarP1NC& q);
/// lap~_h v, componentwise.
VectorP0 laplacian_p0(const VectorP0& v);
/// b~_h(u, v), componentwise.
VectorP0 upwind_convection(const P0CapRT0& u, const VectorP0& v);
/// b_h(u, v, w) = (b~_h(u, v), w).
double trilinear_form(const P0CapRT0& u, const VectorP0& v, const VectorP0& w);

/// Applies a per-component nt x nt matrix to both components of a P0 vector field.
std::vector<double> apply_componentwise(const SparseOperator& A, std::span<const double> blocked);

/// Mesh operators assembled once and reused by the scheme and the checks.
struct OperatorSet {
  explicit OperatorSet(const Mesh& mesh);

  const Mesh* mesh;
  SparseOperator G;
  SparseOperator D;
  SparseOperator A;
  SparseOperator L;
  std::vector<double> mass_p0;    // |K|
  std::vector<double> mass_v;     // |K| repeated for both components
  std::vector<double> mass_p1nc;  // diagonal P1NC mass
};

void export_matrix(const SparseOperator& A, const std::filesystem::path& path);

}  // namespace fvproj
