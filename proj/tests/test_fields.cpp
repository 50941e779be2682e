#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fvproj/analysis.hpp"
#include "fvproj/fields.hpp"
#include "fvproj/operators.hpp"
#include "fvproj/problems.hpp"
#include "support/helpers.hpp"

using namespace fvproj;
using testing_support::random_values;
using testing_support::to_mesh;

TEST_CASE("cell averages") {
  const Mesh right = to_mesh(oracle::unit_right_triangle());
  CHECK(project_p0(right, ScalarFunction([](const Vec2& p) { return p.x; }))[0] ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const Mesh m = acute_square_mesh(0);
  const ScalarP0 c = project_p0(m, ScalarFunction([](const Vec2&) { return 2.5; }));
  for (std::size_t k = 0; k < m.num_triangles(); ++k) CHECK(c[k] == doctest::Approx(2.5).epsilon(1e-15));

  const VectorP0 v = project_p0(m, VectorFunction([](const Vec2&) { return Vec2{1.0, -3.0}; }));
  for (std::size_t k = 0; k < m.num_triangles(); ++k) {
    CHECK(v.at(k).x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.at(k).y == doctest::Approx(-3.0).epsilon(1e-15));
  }
}

TEST_CASE("cell averages reproduce L2 pairings against P0 functions") {
  const Mesh m = acute_square_mesh(0);
  // Degree four over the whole square.
  const ScalarP0 w4 = project_p0(m, ScalarFunction([](const Vec2& p) { return p.x * p.x * p.y * p.y; }));
  const ScalarP0 one(m, std::vector<double>(m.num_triangles(), 1.0));
  CHECK(l2_inner(w4, one) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));

  // Quadratic against a random P0 function; the edge-midpoint rule is exact for quadratics.
  auto w = [](const Vec2& p) { return p.x * p.x + 3.0 * p.x * p.y - p.y * p.y + 0.5; };
  const ScalarP0 pw = project_p0(m, ScalarFunction(w));
  std::mt19937_64 rng(5);
  const ScalarP0 vh(m, random_values(rng, m.num_triangles()));
  double exact = 0.0;
  for (std::size_t k = 0; k < m.num_triangles(); ++k) {
    const auto& t = m.triangle(k);
    double s = 0.0;
    for (int e : t.edges) s += w(m.edge(static_cast<std::size_t>(e)).midpoint);
    exact += vh[k] * t.area / 3.0 * s;
  }
  CHECK(l2_inner(pw, vh) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("circumcenter point values") {
  const Mesh eq = to_mesh(oracle::equilateral());
  const VectorFunction id = [](const Vec2& p) { return p; };
  const VectorP0 pv = project_p0_pointvalue(eq, id);
  CHECK(pv.at(0).x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pv.at(0).y == doctest::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-15));
  // Equilateral: circumcenter is the centroid, so both projections agree on affine data.
  const VectorP0 avg = project_p0(eq, id);
  CHECK(std::abs(avg.at(0).x - pv.at(0).x) <= 1e-15);
  CHECK(std::abs(avg.at(0).y - pv.at(0).y) <= 1e-15);

  const Mesh acute = Mesh::from_arrays({{0, 0}, {1, 0}, {0.3, 0.8}}, {{0, 1, 2}});
  const VectorP0 a = project_p0(acute, id);
  const VectorP0 b = project_p0_pointvalue(acute, id);
  CHECK(std::hypot(a.at(0).x - b.at(0).x, a.at(0).y - b.at(0).y) > 1e-3);

  const VectorP0 c = project_p0_pointvalue(acute, VectorFunction([](const Vec2&) { return Vec2{4, 5}; }));
  CHECK(c.at(0) == Vec2{4, 5});
}

TEST_CASE("edge averages") {
  const Mesh m = acute_square_mesh(0);
  const ScalarP1NC c = project_p1nc(m, [](const Vec2&) { return -1.25; });
  for (std::size_t e = 0; e < m.num_edges(); ++e) CHECK(c[e] == doctest::Approx(-1.25).epsilon(1e-15));

  auto affine = [](const Vec2& p) { return 2.0 * p.x - 0.5 * p.y + 1.0; };
  const ScalarP1NC a = project_p1nc(m, affine);
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    CHECK(std::abs(a[e] - affine(m.edge(e).midpoint)) <= 1e-14);
  }
  // The affine reconstruction reproduces affine data everywhere in a triangle.
  const Vec2 x = m.triangle(3).circumcenter;
  CHECK(std::abs(evaluate_p1nc(a, 3, x) - affine(x)) <= 1e-14);
}

TEST_CASE("P1NC interpolation error decays with h") {
  auto q = [](const Vec2& p) { return std::sin(std::numbers::pi * p.x) * std::cos(2.0 * p.y); };
  std::vector<double> h;
  std::vector<double> err;
  for (int level = 0; level <= 2; ++level) {
    const Mesh m = acute_square_mesh(level);
    h.push_back(m.h());
    err.push_back(p1nc_interpolation_error(m, q));
  }
  CHECK(err[2] < err[1]);
  CHECK(err[1] < err[0]);
  CHECK(log_log_slope(h, err) >= 1.0);
}

TEST_CASE("normal fluxes") {
  const Mesh m = acute_square_mesh(0);
  const VectorRT0 f = project_rt0(m, [](const Vec2&) { return Vec2{1.0, 0.0}; });
  for (int e : m.interior_edges()) {
    CHECK(std::abs(f[static_cast<std::size_t>(e)] - m.edge(static_cast<std::size_t>(e)).normal.x) <= 1e-15);
  }
  for (int e : m.boundary_edges()) CHECK(f[static_cast<std::size_t>(e)] == 0.0);
}

TEST_CASE("fluxes of a stream-function velocity") {
  const Mesh m = acute_square_mesh(1);
  const VectorRT0 f = project_rt0(m, bubble::velocity, 9);
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < m.num_triangles(); ++k) {
    const auto& t = m.triangle(k);
    double net = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto e = static_cast<std::size_t>(t.edges[static_cast<std::size_t>(i)]);
      net += t.edge_sign[static_cast<std::size_t>(i)] * m.edge(e).length * f[e];
      scale = std::max(scale, m.edge(e).length * std::abs(f[e]));
    }
    worst = std::max(worst, std::abs(net));
  }
  CHECK(worst <= 1e-8 * scale);

  // The velocity vanishes identically on the boundary.
  for (int e : m.boundary_edges()) {
    const Edge& ed = m.edge(static_cast<std::size_t>(e));
    const Vec2 a = m.vertices()[static_cast<std::size_t>(ed.vertices[0])];
    const Vec2 b = m.vertices()[static_cast<std::size_t>(ed.vertices[1])];
    for (double s : {0.0, 0.21, 0.5, 0.87, 1.0}) {
      const Vec2 u = bubble::velocity((1 - s) * a + s * b);
      CHECK(std::abs(dot(u, ed.normal)) <= 1e-15);
    }
  }
}

TEST_CASE("L2 inner products") {
  const Mesh m = acute_square_mesh(0);
  const ScalarP0 one(m, std::vector<double>(m.num_triangles(), 1.0));
  CHECK(l2_norm(one) * l2_norm(one) == doctest::Approx(1.0).epsilon(1e-14));

  const Mesh right = to_mesh(oracle::unit_right_triangle());
  const ScalarP1NC q = project_p1nc(right, [](const Vec2& p) { return p.x; });
  CHECK(std::abs(l2_inner(q, q) - 1.0 / 12.0) <= 1e-15);

  std::mt19937_64 rng(9);
  for (int r = 0; r < 10; ++r) {
    const VectorP0 a(m, random_values(rng, 2 * m.num_triangles()));
    const VectorP0 b(m, random_values(rng, 2 * m.num_triangles()));
    CHECK(std::abs(l2_inner(a, b)) <= l2_norm(a) * l2_norm(b));
    const ScalarP1NC s(m, random_values(rng, m.num_edges()));
    const ScalarP1NC t(m, random_values(rng, m.num_edges()));
    CHECK(std::abs(l2_inner(s, t)) <= l2_norm(s) * l2_norm(t));
  }
}

TEST_CASE("discrete H1 norm") {
  const Mesh m = acute_square_mesh(0);
  CHECK(h_norm(VectorP0(m)) == 0.0);

  // One nonzero cell next to one empty cell.
  const auto o = oracle::rhombus();
  const Mesh r = to_mesh(o);
  VectorP0 v(r);
  v.set(0, {1.0, 0.0});
  double expected = 0.0;
  for (int e = 0; e < o.ne; ++e) {
    const auto& adj = o.edge_cells[static_cast<std::size_t>(e)];
    const bool touches_first = adj[0].first == 0 || (adj.size() == 2 && adj[1].first == 0);
    if (touches_first) expected += o.length[static_cast<std::size_t>(e)] / o.distance[static_cast<std::size_t>(e)];
  }
  CHECK(h_norm(v) * h_norm(v) == doctest::Approx(expected).epsilon(1e-14));

  std::mt19937_64 rng(2);
  const VectorP0 w(m, random_values(rng, 2 * m.num_triangles()));
  const double lap = -l2_inner(laplacian_p0(w), w);
  CHECK(std::abs(lap - h_norm(w) * h_norm(w)) <= 1e-12 * lap);
}

TEST_CASE("dual norm bounds every pairing") {
  const Mesh m = acute_square_mesh(0);
  CHECK(dual_norm(VectorP0(m)) == 0.0);
  std::mt19937_64 rng(4);
  for (int r = 0; r < 8; ++r) {
    const VectorP0 v(m, random_values(rng, 2 * m.num_triangles()));
    const VectorP0 psi(m, random_values(rng, 2 * m.num_triangles()));
    CHECK(std::abs(l2_inner(v, psi)) <= dual_norm(v) * h_norm(psi) * (1 + 1e-12));
  }
}

TEST_CASE("dual norm on two triangles matches brute-force maximization") {
  const auto o = oracle::rhombus();
  const Mesh r = to_mesh(o);
  const VectorP0 v(r, {0.7, -0.2, 0.4, 1.1});
  // sup over the unit circle of each component, then combine the components.
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double a0 = o.area[0] * v[static_cast<std::size_t>(2 * c)];
    const double a1 = o.area[1] * v[static_cast<std::size_t>(2 * c + 1)];
    double best = 0.0;
    const int samples = 2000000;
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * std::numbers::pi * i / samples;
      Eigen::Vector2d psi(std::cos(th), std::sin(th));
      const double hn = std::sqrt(psi.dot(o.fv_laplacian * psi));
      best = std::max(best, (a0 * psi(0) + a1 * psi(1)) / hn);
    }
    total += best * best;
  }
  CHECK(std::abs(dual_norm(v) - std::sqrt(total)) <= 1e-6 * std::sqrt(total));
}

TEST_CASE("P1NC norms and means") {
  const Mesh m = acute_square_mesh(0);
  const ScalarP1NC c(m, std::vector<double>(m.num_edges(), -3.0));
  CHECK(norm_1h(c) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mean(c) == doctest::Approx(-3.0).epsilon(1e-14));
  const ScalarP1NC z = mean_zero(c);
  for (std::size_t e = 0; e < m.num_edges(); ++e) CHECK(std::abs(z[e]) <= 1e-14);

  std::mt19937_64 rng(8);
  const ScalarP1NC q(m, random_values(rng, m.num_edges()));
  const ScalarP1NC once = mean_zero(q);
  const ScalarP1NC twice = mean_zero(once);
  CHECK(std::abs(mean(once)) <= 1e-15);
  for (std::size_t e = 0; e < m.num_edges(); ++e) CHECK(std::abs(once[e] - twice[e]) <= 1e-15);
}

TEST_CASE("divergence-free certificate") {
  const Mesh m = acute_square_mesh(0);
  const auto z = P0CapRT0::zero(m);
  CHECK(z.max_normal_jump() == 0.0);

  std::mt19937_64 rng(3);
  const VectorP0 noise(m, random_values(rng, 2 * m.num_triangles()));
  CHECK_THROWS_AS(P0CapRT0::certify(noise), CertificateError);

  const OperatorSet ops(m);
  const P0CapRT0 a = random_solenoidal(ops, 1);
  const P0CapRT0 b = random_solenoidal(ops, 2);
  CHECK(a.max_normal_jump() <= a.tolerance());
  const P0CapRT0 x = P0CapRT0::extrapolate(a, b);
  CHECK(x.max_normal_jump() <= 1e-10 * max_abs(x.field()));
  for (std::size_t i = 0; i < x.field().size(); ++i) {
    CHECK(x.field()[i] == doctest::Approx(2 * a.field()[i] - b.field()[i]));
  }

  // Fluxes are single-valued; boundary fluxes vanish.
  const VectorRT0 f = a.fluxes();
  for (int e : m.boundary_edges()) CHECK(f[static_cast<std::size_t>(e)] == 0.0);
}

TEST_CASE("field shape checks") {
  const Mesh a = acute_square_mesh(0);
  const Mesh b = acute_square_mesh(0);
  CHECK_THROWS_AS(VectorP0(a, std::vector<double>(3, 0.0)), FieldMismatch);
  VectorP0 u(a);
  const VectorP0 w(b);
  CHECK_THROWS_AS(u += w, FieldMismatch);
}
