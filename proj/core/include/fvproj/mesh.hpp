#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvproj/geometry.hpp"

namespace fvproj {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh file.
class MeshParseError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Index out of range, duplicate triangle, or an edge shared by more than two triangles.
class MeshTopologyError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Clockwise or degenerate triangle.
class MeshOrientationError : public MeshError {
 public:
  using MeshError::MeshError;
};

inline constexpr int kNoNeighbor = -1;

struct Triangle {
  std::array<int, 3> vertices{};
  /// edges[i] is the edge opposite vertices[i].
  std::array<int, 3> edges{};
  /// +1 when this triangle owns edges[i] (the stored edge normal points out of it), -1 otherwise.
  std::array<double, 3> edge_sign{};
  double area = 0.0;
  Vec2 circumcenter;
  double circumdiameter = 0.0;
};

struct Edge {
  /// Sorted vertex ids: vertices[0] < vertices[1].
  std::array<int, 2> vertices{};
  double length = 0.0;
  Vec2 midpoint;
  int owner = kNoNeighbor;
  int neighbor = kNoNeighbor;
  /// Unit normal pointing out of the owner triangle.
  Vec2 normal;
  /// Circumcenter-to-circumcenter distance, or owner circumcenter to midpoint on the boundary.
  double distance = 0.0;
  double transmissibility = 0.0;

  [[nodiscard]] bool is_boundary() const noexcept { return neighbor == kNoNeighbor; }
};

/// Immutable triangulation with the geometric quantities used by the finite
/// volume operators.
///
/// Edges are numbered in lexicographic order of their (min, max) vertex ids,
/// and the owner of an interior edge is the lower-numbered adjacent triangle.
/// Every reduction in the library iterates in this order.
class Mesh {
 public:
  Mesh() = default;

  /// Builds connectivity and geometry. Triangles must be counterclockwise.
  /// Throws MeshTopologyError or MeshOrientationError.
  static Mesh from_arrays(std::vector<Vec2> vertices,
                          std::vector<std::array<int, 3>> triangles);

  [[nodiscard]] std::span<const Vec2> vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::span<const Triangle> triangles() const noexcept { return triangles_; }
  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
  [[nodiscard]] std::span<const int> interior_edges() const noexcept { return interior_edges_; }
  [[nodiscard]] std::span<const int> boundary_edges() const noexcept { return boundary_edges_; }

  [[nodiscard]] std::size_t num_vertices() const noexcept { return vertices_.size(); }
  [[nodiscard]] std::size_t num_triangles() const noexcept { return triangles_.size(); }
  [[nodiscard]] std::size_t num_edges() const noexcept { return edges_.size(); }

  [[nodiscard]] const Triangle& triangle(std::size_t k) const { return triangles_[k]; }
  [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_[e]; }

  /// Unit normal of local edge i of triangle k, pointing out of k.
  [[nodiscard]] Vec2 outward_normal(std::size_t k, int i) const {
    const auto& t = triangles_[k];
    return t.edge_sign[i] * edges_[t.edges[i]].normal;
  }

  /// Largest circumdiameter.
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double total_area() const noexcept { return total_area_; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<int> interior_edges_;
  std::vector<int> boundary_edges_;
  double h_ = 0.0;
  double total_area_ = 0.0;
};

struct MeshQualityReport {
  double min_angle = 0.0;  // radians
  double max_angle = 0.0;  // radians
  double min_transmissibility = 0.0;
  double min_distance_ratio = 0.0;  // min d_sigma / |sigma|
  double min_edge_ratio = 0.0;      // min |sigma| / h
  bool admissible = false;
};

/// Reports angle and edge-ratio statistics. Never throws. A right angle makes
/// the mesh inadmissible.
MeshQualityReport validate_mesh(const Mesh& mesh);

/// Splits every triangle into four congruent children through its edge
/// midpoints. New vertices are appended in edge order.
Mesh refine_uniform(const Mesh& mesh);

/// Acute structured triangulation of the unit square; level l has 160 * 4^l triangles.
Mesh acute_square_mesh(int level);

enum class MeshFormat { single_file, node_ele };

/// Single-file format: "NV NT", NV lines "x y", NT lines "i j k" (0-based).
/// node/ele: `path` may name the .node file, the .ele file, or the common stem.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::single_file);

/// Writes the single-file format.
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace fvproj
