#include "fvproj/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace fvproj {

namespace {

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

struct HalfEdge {
  int lo;
  int hi;
  int triangle;
  int local;
};

}  // namespace

Mesh Mesh::from_arrays(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles) {
  Mesh m;
  const int nv = static_cast<int>(vertices.size());
  const int nt = static_cast<int>(triangles.size());

  std::set<std::array<int, 3>> seen;
  for (int k = 0; k < nt; ++k) {
    auto tri = triangles[k];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        std::ostringstream os;
        os << "triangle " << k << " references vertex " << v << " outside [0, " << nv << ")";
        throw MeshTopologyError(os.str());
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshTopologyError("triangle " + std::to_string(k) + " repeats a vertex");
    }
    std::sort(tri.begin(), tri.end());
    if (!seen.insert(tri).second) {
      throw MeshTopologyError("duplicate triangle " + std::to_string(k));
    }
  }

  m.vertices_ = std::move(vertices);
  m.triangles_.resize(nt);
  for (int k = 0; k < nt; ++k) {
    Triangle& t = m.triangles_[k];
    t.vertices = triangles[k];
    const Vec2& a = m.vertices_[t.vertices[0]];
    const Vec2& b = m.vertices_[t.vertices[1]];
    const Vec2& c = m.vertices_[t.vertices[2]];
    const double signed_area = 0.5 * cross(b - a, c - a);
    if (!(signed_area > 0.0)) {
      std::ostringstream os;
      os << "triangle " << k << " has non-positive signed area " << signed_area;
      throw MeshOrientationError(os.str());
    }
    t.area = signed_area;
    t.circumcenter = circumcenter(a, b, c);
    t.circumdiameter = 2.0 * distance(t.circumcenter, a);
    m.h_ = std::max(m.h_, t.circumdiameter);
    m.total_area_ += t.area;
  }

  std::vector<HalfEdge> half_edges;
  half_edges.reserve(3 * static_cast<std::size_t>(nt));
  for (int k = 0; k < nt; ++k) {
    const auto& v = m.triangles_[k].vertices;
    for (int i = 0; i < 3; ++i) {
      const int p = v[(i + 1) % 3];
      const int q = v[(i + 2) % 3];
      half_edges.push_back({std::min(p, q), std::max(p, q), k, i});
    }
  }
  std::sort(half_edges.begin(), half_edges.end(), [](const HalfEdge& x, const HalfEdge& y) {
    return std::tie(x.lo, x.hi, x.triangle) < std::tie(y.lo, y.hi, y.triangle);
  });

  for (std::size_t i = 0; i < half_edges.size();) {
    std::size_t j = i + 1;
    while (j < half_edges.size() && half_edges[j].lo == half_edges[i].lo &&
           half_edges[j].hi == half_edges[i].hi) {
      ++j;
    }
    if (j - i > 2) {
      std::ostringstream os;
      os << "edge (" << half_edges[i].lo << ", " << half_edges[i].hi << ") is shared by "
         << j - i << " triangles";
      throw MeshTopologyError(os.str());
    }
    const int e = static_cast<int>(m.edges_.size());
    Edge edge;
    edge.vertices = {half_edges[i].lo, half_edges[i].hi};
    edge.owner = half_edges[i].triangle;
    const int owner_local = half_edges[i].local;
    m.triangles_[edge.owner].edges[owner_local] = e;
    m.triangles_[edge.owner].edge_sign[owner_local] = 1.0;
    if (j - i == 2) {
      edge.neighbor = half_edges[i + 1].triangle;
      m.triangles_[edge.neighbor].edges[half_edges[i + 1].local] = e;
      m.triangles_[edge.neighbor].edge_sign[half_edges[i + 1].local] = -1.0;
    }

    const auto& ov = m.triangles_[edge.owner].vertices;
    const Vec2& p = m.vertices_[ov[(owner_local + 1) % 3]];
    const Vec2& q = m.vertices_[ov[(owner_local + 2) % 3]];
    const Vec2 tangent = q - p;
    edge.length = norm(tangent);
    edge.midpoint = 0.5 * (p + q);
    // Outward for a counterclockwise owner.
    edge.normal = Vec2{tangent.y, -tangent.x} * (1.0 / edge.length);
    const Vec2& xk = m.triangles_[edge.owner].circumcenter;
    edge.distance = edge.is_boundary() ? distance(xk, edge.midpoint)
                                       : distance(xk, m.triangles_[edge.neighbor].circumcenter);
    edge.transmissibility = edge.length / edge.distance;

    (edge.is_boundary() ? m.boundary_edges_ : m.interior_edges_).push_back(e);
    m.edges_.push_back(edge);
    i = j;
  }
  return m;
}

MeshQualityReport validate_mesh(const Mesh& mesh) {
  MeshQualityReport r;
  r.min_angle = std::numeric_limits<double>::infinity();
  r.max_angle = 0.0;
  for (const auto& t : mesh.triangles()) {
    for (int i = 0; i < 3; ++i) {
      const Vec2& o = mesh.vertices()[t.vertices[i]];
      const Vec2 a = mesh.vertices()[t.vertices[(i + 1) % 3]] - o;
      const Vec2 b = mesh.vertices()[t.vertices[(i + 2) % 3]] - o;
      const double angle = std::atan2(std::abs(cross(a, b)), dot(a, b));
      r.min_angle = std::min(r.min_angle, angle);
      r.max_angle = std::max(r.max_angle, angle);
    }
  }
  r.min_transmissibility = std::numeric_limits<double>::infinity();
  r.min_distance_ratio = std::numeric_limits<double>::infinity();
  r.min_edge_ratio = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.edges()) {
    r.min_transmissibility = std::min(r.min_transmissibility, e.transmissibility);
    r.min_distance_ratio = std::min(r.min_distance_ratio, e.distance / e.length);
    r.min_edge_ratio = std::min(r.min_edge_ratio, e.length / mesh.h());
  }
  if (mesh.num_triangles() == 0) {
    r.min_angle = r.max_angle = 0.0;
    return r;
  }
  // Right angles computed through atan2 land within a few ulps of pi/2.
  constexpr double right_angle_slack = 1e-12;
  const bool acute = r.max_angle < std::numbers::pi / 2 - right_angle_slack;
  const bool ratios_positive = r.min_transmissibility > 0.0 && std::isfinite(r.min_transmissibility) &&
                               r.min_distance_ratio > 0.0 && r.min_edge_ratio > 0.0;
  r.admissible = acute && ratios_positive;
  return r;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  const int nv = static_cast<int>(mesh.num_vertices());
  for (const auto& e : mesh.edges()) {
    vertices.push_back(e.midpoint);
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * mesh.num_triangles());
  for (const auto& t : mesh.triangles()) {
    const auto& v = t.vertices;
    // Midpoint opposite vertex i.
    const int m0 = nv + t.edges[0];
    const int m1 = nv + t.edges[1];
    const int m2 = nv + t.edges[2];
    triangles.push_back({v[0], m2, m1});
    triangles.push_back({m2, v[1], m0});
    triangles.push_back({m1, m0, v[2]});
    triangles.push_back({m0, m1, m2});
  }
  return Mesh::from_arrays(std::move(vertices), std::move(triangles));
}

}  // namespace fvproj
