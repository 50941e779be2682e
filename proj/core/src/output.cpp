#include "fvproj/output.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace fvproj {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw OutputError("cannot write " + path.string());
  }
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) {
    throw OutputError("failed writing " + path.string());
  }
}

template <class F>
void write_scalar_csv(const F& f, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "entity_id,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << i << ',' << format_double(f[i]) << '\n';
  }
  check_written(out, path);
}

void write_grid(std::ofstream& out, const Mesh& mesh, const char* title) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) {
    out << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  }
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) {
    out << "3 " << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    out << "5\n";
  }
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_csv(const ScalarP0& f, const std::filesystem::path& path) { write_scalar_csv(f, path); }
void write_csv(const ScalarP1NC& f, const std::filesystem::path& path) { write_scalar_csv(f, path); }
void write_csv(const VectorRT0& f, const std::filesystem::path& path) { write_scalar_csv(f, path); }

void write_csv(const VectorP0& f, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "entity_id,value_x,value_y\n";
  for (std::size_t k = 0; k < f.mesh().num_triangles(); ++k) {
    const Vec2 v = f.at(k);
    out << k << ',' << format_double(v.x) << ',' << format_double(v.y) << '\n';
  }
  check_written(out, path);
}

void write_vtk(const VectorP0& velocity, const ScalarP1NC* pressure, const std::filesystem::path& path) {
  const Mesh& mesh = velocity.mesh();
  auto out = open_output(path);
  write_grid(out, mesh, "fvproj state");
  out << "CELL_DATA " << mesh.num_triangles() << '\n';
  out << "VECTORS velocity double\n";
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const Vec2 v = velocity.at(k);
    out << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  }
  if (pressure != nullptr) {
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
      const auto& t = mesh.triangle(k);
      double s = 0.0;
      for (int e : t.edges) s += (*pressure)[static_cast<std::size_t>(e)];
      out << format_double(s / 3.0) << '\n';
    }
  }
  check_written(out, path);
}

void write_vtk_points(const ScalarP1NC& q, const std::filesystem::path& path) {
  const Mesh& mesh = q.mesh();
  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\nfvproj P1NC midpoint values\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.num_edges() << " double\n";
  for (const auto& e : mesh.edges()) {
    out << format_double(e.midpoint.x) << ' ' << format_double(e.midpoint.y) << " 0\n";
  }
  out << "VERTICES " << mesh.num_edges() << ' ' << 2 * mesh.num_edges() << '\n';
  for (std::size_t s = 0; s < mesh.num_edges(); ++s) {
    out << "1 " << s << '\n';
  }
  out << "POINT_DATA " << mesh.num_edges() << "\nSCALARS value double 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < mesh.num_edges(); ++s) {
    out << format_double(q[s]) << '\n';
  }
  check_written(out, path);
}

void write_monitors_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "step,t,u_norm,u_tilde_h,p_norm,div_residual,increment,energy,pressure_sum,"
         "orthogonality,pythagoras,energy_identity,normal_jump\n";
  for (const auto& r : trajectory.steps) {
    out << r.step;
    for (double v : {r.t, r.u_norm, r.u_tilde_h, r.p_norm, r.div_residual, r.increment, r.energy, r.pressure_sum,
                     r.orthogonality, r.pythagoras, r.energy_identity, r.normal_jump}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  check_written(out, path);
}

std::filesystem::path write_snapshot(const SchemeState& state, const std::filesystem::path& dir) {
  std::array<char, 32> name{};
  std::snprintf(name.data(), name.size(), "state_%06d.vtk", state.n);
  const auto path = dir / name.data();
  write_vtk(state.u_curr.field(), &state.p_curr, path);
  return path;
}

}  // namespace fvproj
