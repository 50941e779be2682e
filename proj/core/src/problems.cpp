#include "fvproj/problems.hpp"

#include <cmath>
#include <numbers>

namespace fvproj {

namespace {

// g(s) = s^2 (1 - s)^2 and its derivatives.
double g0(double s) { return s * s * (1 - s) * (1 - s); }
double g1(double s) { return 2 * s * (1 - s) * (1 - 2 * s); }
double g2(double s) { return 2 * (1 - 6 * s + 6 * s * s); }
double g3(double s) { return 12 * (2 * s - 1); }

}  // namespace

namespace manufactured {

Vec2 velocity(const Vec2& p) {
  return {kAmplitude * g0(p.x) * g1(p.y), -kAmplitude * g1(p.x) * g0(p.y)};
}

double pressure(const Vec2& p) { return std::cos(std::numbers::pi * p.x) * std::cos(std::numbers::pi * p.y); }

Vec2 forcing(const Vec2& p, double reynolds) {
  const double A = kAmplitude;
  const double x = p.x;
  const double y = p.y;
  const double u1 = A * g0(x) * g1(y);
  const double u2 = -A * g1(x) * g0(y);
  const double u1x = A * g1(x) * g1(y);
  const double u1y = A * g0(x) * g2(y);
  const double u2x = -A * g2(x) * g0(y);
  const double u2y = -A * g1(x) * g1(y);
  const double lap1 = A * (g2(x) * g1(y) + g0(x) * g3(y));
  const double lap2 = -A * (g3(x) * g0(y) + g1(x) * g2(y));
  const double pi = std::numbers::pi;
  const double px = -pi * std::sin(pi * x) * std::cos(pi * y);
  const double py = -pi * std::cos(pi * x) * std::sin(pi * y);
  return {-lap1 / reynolds + u1 * u1x + u2 * u1y + px, -lap2 / reynolds + u1 * u2x + u2 * u2y + py};
}

}  // namespace manufactured

namespace bubble {

// psi = (x(1-x) y(1-y))^2 = g(x) g(y).
double stream(const Vec2& p) { return g0(p.x) * g0(p.y); }

Vec2 velocity(const Vec2& p) { return {g0(p.x) * g1(p.y), -g1(p.x) * g0(p.y)}; }

std::array<Vec2, 2> velocity_gradient(const Vec2& p) {
  return {Vec2{g1(p.x) * g1(p.y), g0(p.x) * g2(p.y)}, Vec2{-g2(p.x) * g0(p.y), -g1(p.x) * g1(p.y)}};
}

}  // namespace bubble

Problem make_problem(std::string_view name, double reynolds) {
  Problem p;
  p.name = std::string(name);
  if (name == "zero") {
    p.initial_velocity = [](const Vec2&) { return Vec2{}; };
    p.forcing = [](const Vec2&, double) { return Vec2{}; };
    p.exact_velocity = p.initial_velocity;
    p.exact_pressure = [](const Vec2&) { return 0.0; };
    return p;
  }
  if (name == "manufactured-A") {
    p.initial_velocity = manufactured::velocity;
    p.forcing = [reynolds](const Vec2& x, double) { return manufactured::forcing(x, reynolds); };
    p.exact_velocity = manufactured::velocity;
    p.exact_pressure = manufactured::pressure;
    return p;
  }
  throw UnknownProblem("unknown problem '" + std::string(name) + "' (expected zero or manufactured-A)");
}

}  // namespace fvproj
