#pragma once

#include <array>
#include <vector>

#include "fvproj/geometry.hpp"

namespace fvproj {

/// Symmetric rule on a triangle. Weights sum to one, so an integral is
/// area * sum(w_i f(x_i)).
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1]. Weights sum to one.
struct SegmentRule {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Smallest Dunavant rule exact for polynomials of total degree `degree`
/// (supported up to 5). Throws std::invalid_argument beyond that.
const TriangleRule& triangle_rule(int degree);

/// Smallest Gauss rule exact up to `degree` (supported up to 9).
const SegmentRule& segment_rule(int degree);

/// Integral of f over the triangle (a, b, c).
template <class F>
auto integrate_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const TriangleRule& rule, F&& f) {
  const double area = 0.5 * std::abs(cross(b - a, c - a));
  decltype(f(a)) sum{};
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const auto& l = rule.barycentric[q];
    const Vec2 x = l[0] * a + l[1] * b + l[2] * c;
    sum += rule.weights[q] * f(x);
  }
  return area * sum;
}

/// Mean value of f over the segment [a, b].
template <class F>
auto average_segment(const Vec2& a, const Vec2& b, const SegmentRule& rule, F&& f) {
  decltype(f(a)) sum{};
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const double s = rule.nodes[q];
    sum += rule.weights[q] * f((1.0 - s) * a + s * b);
  }
  return sum;
}

}  // namespace fvproj
