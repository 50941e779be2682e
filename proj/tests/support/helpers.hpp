#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <vector>

#include "fvproj/mesh.hpp"
#include "fvproj/sparse.hpp"
#include "oracle.hpp"

namespace testing_support {

inline fvproj::Mesh to_mesh(const oracle::DenseModel& m) {
  std::vector<fvproj::Vec2> v;
  for (const auto& p : m.vertices) v.push_back({p.x(), p.y()});
  std::vector<std::array<int, 3>> t(m.cells.begin(), m.cells.end());
  return fvproj::Mesh::from_arrays(std::move(v), std::move(t));
}

/// Oracle built from the raw vertex and triangle arrays of a library mesh.
inline oracle::DenseModel to_oracle(const fvproj::Mesh& mesh) {
  std::vector<oracle::Point> v;
  for (const auto& p : mesh.vertices()) v.emplace_back(p.x, p.y);
  std::vector<oracle::Cell> t;
  for (const auto& tri : mesh.triangles()) t.push_back(tri.vertices);
  return oracle::build(std::move(v), std::move(t));
}

inline Eigen::MatrixXd dense(const fvproj::SparseOperator& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  const auto off = a.row_offsets();
  const auto cols = a.col_ids();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      d(static_cast<Eigen::Index>(i), cols[p]) += vals[p];
    }
  }
  return d;
}

inline Eigen::VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testing_support
