#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fvproj/fields.hpp"

namespace fvproj {

using TimeVectorFunction = std::function<Vec2(const Vec2&, double)>;

/// Initial data and forcing for a run. `exact_velocity`/`exact_pressure` are
/// set when the problem has a known solution.
struct Problem {
  std::string name;
  VectorFunction initial_velocity;
  TimeVectorFunction forcing;
  VectorFunction exact_velocity;
  ScalarFunction exact_pressure;
};

class UnknownProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Built-ins: "zero" (no flow, no forcing) and "manufactured-A", a steady
/// solution u = curl(64 g(x) g(y)) with g(s) = s^2 (1-s)^2, p = cos(pi x) cos(pi y),
/// whose forcing balances viscosity, convection and the pressure gradient.
Problem make_problem(std::string_view name, double reynolds);

namespace manufactured {

inline constexpr double kAmplitude = 64.0;

Vec2 velocity(const Vec2& x);
double pressure(const Vec2& x);
Vec2 forcing(const Vec2& x, double reynolds);

}  // namespace manufactured

/// Stream function (x(1-x)y(1-y))^2 and its curl, used by the convergence checks.
namespace bubble {

double stream(const Vec2& x);
Vec2 velocity(const Vec2& x);
/// Gradient of each velocity component: rows (du1/dx, du1/dy), (du2/dx, du2/dy).
std::array<Vec2, 2> velocity_gradient(const Vec2& x);

}  // namespace bubble

}  // namespace fvproj
