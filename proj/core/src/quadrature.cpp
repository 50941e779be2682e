#include "fvproj/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fvproj {

namespace {

void add_orbit3(TriangleRule& r, double a, double b, double w) {
  // Permutations of (a, b, b).
  r.barycentric.push_back({a, b, b});
  r.barycentric.push_back({b, a, b});
  r.barycentric.push_back({b, b, a});
  r.weights.insert(r.weights.end(), 3, w);
}

std::vector<TriangleRule> make_triangle_rules() {
  std::vector<TriangleRule> rules;

  TriangleRule centroid;
  centroid.degree = 1;
  centroid.barycentric.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  centroid.weights.push_back(1.0);
  rules.push_back(centroid);

  TriangleRule three;
  three.degree = 2;
  add_orbit3(three, 2.0 / 3, 1.0 / 6, 1.0 / 3);
  rules.push_back(three);

  // Dunavant degree 4, 6 points.
  TriangleRule six;
  six.degree = 4;
  add_orbit3(six, 0.108103018168070, 0.445948490915965, 0.223381589678011);
  add_orbit3(six, 0.816847572980459, 0.091576213509771, 0.109951743655322);
  rules.push_back(six);

  // Dunavant degree 5, 7 points.
  TriangleRule seven;
  seven.degree = 5;
  seven.barycentric.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  seven.weights.push_back(0.225);
  add_orbit3(seven, 0.059715871789770, 0.470142064105115, 0.132394152788506);
  add_orbit3(seven, 0.797426985353087, 0.101286507323456, 0.125939180544827);
  rules.push_back(seven);
  return rules;
}

SegmentRule gauss_legendre(int n) {
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  SegmentRule r;
  r.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes.push_back(0.5 * (1.0 - x));
    r.weights.push_back(0.5 * w);
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const std::vector<TriangleRule> rules = make_triangle_rules();
  for (const auto& r : rules) {
    if (r.degree >= degree) {
      return r;
    }
  }
  throw std::invalid_argument("no triangle quadrature rule of degree " + std::to_string(degree));
}

const SegmentRule& segment_rule(int degree) {
  static const std::vector<SegmentRule> rules = [] {
    std::vector<SegmentRule> v;
    for (int n = 1; n <= 5; ++n) {
      v.push_back(gauss_legendre(n));
    }
    return v;
  }();
  for (const auto& r : rules) {
    if (r.degree >= degree) {
      return r;
    }
  }
  throw std::invalid_argument("no segment quadrature rule of degree " + std::to_string(degree));
}

}  // namespace fvproj
