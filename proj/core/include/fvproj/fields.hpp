#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fvproj/geometry.hpp"
#include "fvproj/mesh.hpp"

namespace fvproj {

struct SolverConfig;

/// Discrete function spaces. Values are stored per dof:
///  - p0_scalar: one value per triangle
///  - p0_vector: two values per triangle, component-blocked (all x, then all y)
///  - p1nc: value at each edge midpoint
///  - rt0: normal flux across each edge, relative to the owner's outward normal
enum class Space { p0_scalar, p0_vector, p1nc, rt0 };

std::size_t dof_count(const Mesh& mesh, Space space);

class FieldMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value-semantic snapshot of a discrete function. Holds a non-owning pointer
/// to its mesh; the mesh must outlive the field.
template <Space S>
class Field {
 public:
  static constexpr Space space = S;

  explicit Field(const Mesh& mesh) : mesh_(&mesh), values_(dof_count(mesh, S), 0.0) {}

  Field(const Mesh& mesh, std::vector<double> values) : mesh_(&mesh), values_(std::move(values)) {
    if (values_.size() != dof_count(mesh, S)) {
      throw FieldMismatch("value count does not match the space dimension");
    }
  }

  [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Component c (0 = x, 1 = y) of a vector P0 field.
  [[nodiscard]] std::span<const double> component(int c) const requires(S == Space::p0_vector) {
    const std::size_t n = mesh_->num_triangles();
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * n, n);
  }
  [[nodiscard]] std::span<double> component(int c) requires(S == Space::p0_vector) {
    const std::size_t n = mesh_->num_triangles();
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * n, n);
  }
  [[nodiscard]] Vec2 at(std::size_t k) const requires(S == Space::p0_vector) {
    return {values_[k], values_[mesh_->num_triangles() + k]};
  }
  void set(std::size_t k, const Vec2& v) requires(S == Space::p0_vector) {
    values_[k] = v.x;
    values_[mesh_->num_triangles() + k] = v.y;
  }

  Field& operator+=(const Field& o) {
    check_same_mesh(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_mesh(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

  void check_same_mesh(const Field& o) const {
    if (mesh_ != o.mesh_) {
      throw FieldMismatch("fields live on different meshes");
    }
  }

 private:
  const Mesh* mesh_;
  std::vector<double> values_;
};

using ScalarP0 = Field<Space::p0_scalar>;
using VectorP0 = Field<Space::p0_vector>;
using ScalarP1NC = Field<Space::p1nc>;
using VectorRT0 = Field<Space::rt0>;

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default relative tolerance on the normal jump of a P0 ∩ RT0 field.
inline constexpr double kCertificateTolerance = 1e-10;

/// Piecewise-constant vector field whose normal component is continuous across
/// interior edges and vanishes on the boundary, up to a recorded tolerance.
class P0CapRT0 {
 public:
  /// Throws CertificateError when the largest normal jump exceeds
  /// `relative_tolerance * max_K |v_K|`.
  static P0CapRT0 certify(VectorP0 field, double relative_tolerance = kCertificateTolerance);
  static P0CapRT0 zero(const Mesh& mesh);

  [[nodiscard]] const VectorP0& field() const noexcept { return field_; }
  [[nodiscard]] const Mesh& mesh() const noexcept { return field_.mesh(); }
  /// Largest |(v_L - v_K) . n| over interior edges and |v_K . n| over boundary edges.
  [[nodiscard]] double max_normal_jump() const noexcept { return max_jump_; }
  [[nodiscard]] double tolerance() const noexcept { return tolerance_; }

  /// Single-valued edge fluxes: the mean of both one-sided traces, zero on the boundary.
  [[nodiscard]] VectorRT0 fluxes() const;

  /// 2a - b, which keeps the certificate of both arguments.
  static P0CapRT0 extrapolate(const P0CapRT0& a, const P0CapRT0& b);

 private:
  P0CapRT0(VectorP0 field, double jump, double tol)
      : field_(std::move(field)), max_jump_(jump), tolerance_(tol) {}

  VectorP0 field_;
  double max_jump_ = 0.0;
  double tolerance_ = 0.0;
};

/// Largest normal jump of a P0 vector field (see P0CapRT0::max_normal_jump).
double max_normal_jump(const VectorP0& v);
double max_abs(const VectorP0& v);

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Cell averages by quadrature, exact up to `quad_order`.
ScalarP0 project_p0(const Mesh& mesh, const ScalarFunction& f, int quad_order = 4);
VectorP0 project_p0(const Mesh& mesh, const VectorFunction& f, int quad_order = 4);

/// Values at circumcenters.
VectorP0 project_p0_pointvalue(const Mesh& mesh, const VectorFunction& f);

/// Edge averages; the midpoint value of the affine reconstruction equals the edge mean.
ScalarP1NC project_p1nc(const Mesh& mesh, const ScalarFunction& q, int quad_order = 5);

/// Edge averages of u . n relative to the owner normal; boundary fluxes are set to zero.
VectorRT0 project_rt0(const Mesh& mesh, const VectorFunction& u, int quad_order = 5);

/// Triangle-wise value of the affine reconstruction of q at x (x in triangle k).
double evaluate_p1nc(const ScalarP1NC& q, std::size_t k, const Vec2& x);

/// Lumped mass weights: |K| per triangle.
std::vector<double> p0_mass(const Mesh& mesh);

/// Diagonal P1NC mass: (|K| + |L|) / 3 on interior edges, |K| / 3 on boundary edges.
std::vector<double> p1nc_mass(const Mesh& mesh);

double l2_inner(const ScalarP0& a, const ScalarP0& b);
double l2_inner(const VectorP0& a, const VectorP0& b);
/// Edge-midpoint rule, exact for products of affine functions.
double l2_inner(const ScalarP1NC& a, const ScalarP1NC& b);

template <Space S>
double l2_norm(const Field<S>& a) {
  return std::sqrt(l2_inner(a, a));
}

/// Discrete H1 norm: interior jumps and boundary values weighted by transmissibility.
double h_norm(const ScalarP0& v);
double h_norm(const VectorP0& v);

/// sup over psi of (v, psi) / ||psi||_h, evaluated through one solve per component.
double dual_norm(const VectorP0& v);
double dual_norm(const VectorP0& v, const SolverConfig& config);

/// (|q|^2 + |grad_h q|^2)^(1/2).
double norm_1h(const ScalarP1NC& q);

/// Mass-weighted mean.
double mean(const ScalarP1NC& q);
ScalarP1NC mean_zero(const ScalarP1NC& q);

/// L2 distance between q and its P1NC interpolant, integrated with the
/// triangle rule of `quad_order` on each element.
double p1nc_interpolation_error(const Mesh& mesh, const ScalarFunction& q, int quad_order = 5);

}  // namespace fvproj
