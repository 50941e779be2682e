#pragma once

#include <filesystem>
#include <string>

#include "fvproj/fields.hpp"
#include "fvproj/scheme.hpp"

namespace fvproj {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips, so repeated runs are byte-identical.
std::string format_double(double v);

/// CSV with header `entity_id,value` (scalars) or `entity_id,value_x,value_y` (P0 vectors).
void write_csv(const ScalarP0& f, const std::filesystem::path& path);
void write_csv(const VectorP0& f, const std::filesystem::path& path);
void write_csv(const ScalarP1NC& f, const std::filesystem::path& path);
void write_csv(const VectorRT0& f, const std::filesystem::path& path);

/// Legacy ASCII VTK unstructured grid with CELL_DATA: velocity vectors and,
/// if given, the cell mean of the pressure (mean of the three midpoint values).
void write_vtk(const VectorP0& velocity, const ScalarP1NC* pressure, const std::filesystem::path& path);

/// P1NC values as a VTK point cloud at edge midpoints (POINT_DATA).
void write_vtk_points(const ScalarP1NC& q, const std::filesystem::path& path);

/// One row per step: step,t,u_norm,u_tilde_h,p_norm,div_residual,increment,
/// energy,pressure_sum,orthogonality,pythagoras,energy_identity,normal_jump.
void write_monitors_csv(const Trajectory& trajectory, const std::filesystem::path& path);

/// `dir/state_%06d.vtk` for the state's step index.
std::filesystem::path write_snapshot(const SchemeState& state, const std::filesystem::path& dir);

}  // namespace fvproj
