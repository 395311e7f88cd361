#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dhflow/analysis/analysis.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/geometry/generators.hpp"
#include "dhflow/geometry/target.hpp"

using namespace dhflow;
using geometry::MapField;
using geometry::TargetManifold;
using geometry::TorusDomain;
using geometry::Vec;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Degree-one bump: the disk of radius rho around the center wraps the
// sphere once, the rest sits at the north pole. `flip` reflects it.
MapField bump_map(const TorusDomain& d, double rho, bool flip) {
  MapField u(d, 3);
  const double c = std::numbers::pi;
  for (int i = 0; i < d.n1(); ++i)
    for (int j = 0; j < d.n2(); ++j) {
      const double a = d.x(i) - c, b = d.y(j) - c;
      const double r = std::hypot(a, b);
      const double phi = r < rho ? std::numbers::pi * (1.0 - r / rho) * (1.0 - r / rho) : 0.0;
      const double th = std::atan2(b, a);
      double* v = u.at(d.node(i, j));
      v[0] = std::sin(phi) * std::cos(th);
      v[1] = (flip ? -1.0 : 1.0) * std::sin(phi) * std::sin(th);
      v[2] = std::cos(phi);
    }
  return u;
}

}  // namespace

TEST_CASE("sphere projection derivatives at a pole") {
  const TargetManifold N = TargetManifold::sphere(2);
  const Vec z = vec({1.0, 0.0, 0.0});
  const geometry::Mat J = N.jacobian(z);
  CHECK(J(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(J(1, 1) == doctest::Approx(1.0));
  CHECK(J(2, 2) == doctest::Approx(1.0));
  CHECK(J(1, 2) == doctest::Approx(0.0));
  // d^2 (z / |z|)^1 / dz^2 dz^2 = -1 at (1, 0, 0).
  const std::vector<double> H = N.hessian(z);
  CHECK(H[(0 * 3 + 1) * 3 + 1] == doctest::Approx(-1.0));
  // II(X, X) = -|X|^2 p on the unit sphere.
  const Vec II = N.second_fundamental_form(vec({0, 0, 1}), vec({1, 0, 0}), vec({1, 0, 0}));
  CHECK(II[2] == doctest::Approx(-1.0));
  CHECK(std::abs(II[0]) + std::abs(II[1]) < 1e-14);
}

TEST_CASE("projection jacobian matches central differences in the tube") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const TargetManifold& N : {TargetManifold::sphere(2), TargetManifold::circle_torus(2)}) {
    const int q = N.ambient_dim();
    for (int trial = 0; trial < 20; ++trial) {
      Vec z(q);
      for (int A = 0; A < q; ++A) z[A] = g(rng);
      const Vec p = [&] {
        Vec w = z;
        const int block = N.kind() == geometry::TargetKind::Sphere ? q : 2;
        for (int b = 0; b < q; b += block) w.segment(b, block).normalize();
        return w;
      }();
      Vec off(q);
      for (int A = 0; A < q; ++A) off[A] = g(rng);
      const Vec x = p + 0.3 * N.tube_radius() * off.normalized();
      const geometry::Mat J = N.jacobian(x);
      const double h = 1e-6;
      for (int B = 0; B < q; ++B) {
        Vec e = Vec::Zero(q);
        e[B] = h;
        const Vec fd = (N.project(Vec(x + e)) - N.project(Vec(x - e))) / (2 * h);
        for (int A = 0; A < q; ++A) CHECK(std::abs(J(A, B) - fd[A]) < 1e-6);
      }
    }
  }
}

TEST_CASE("projection outside the reach is refused") {
  const TargetManifold N = TargetManifold::sphere(2);
  CHECK_THROWS_AS(N.project(vec({0.0, 0.0, 0.0})), TubeViolation);
}

TEST_CASE("sphere degree of a wrapped bump is +-1") {
  const TorusDomain d = TorusDomain::square(32);
  const TargetManifold N = TargetManifold::sphere(2);
  const auto a = analysis::homotopy_invariants(N, bump_map(d, 2.5, false));
  const auto b = analysis::homotopy_invariants(N, bump_map(d, 2.5, true));
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(std::abs(a[0]) == 1);
  CHECK(b[0] == -a[0]);
  const auto c = analysis::homotopy_invariants(
      N, geometry::constant_map(d, N, geometry::base_point(N)));
  CHECK(c == std::vector<int>{0});
}

TEST_CASE("circle windings are read back per generator") {
  const TorusDomain d = TorusDomain::square(16);
  const TargetManifold N = TargetManifold::circle_torus(1);
  CHECK(analysis::homotopy_invariants(N, geometry::winding_map(d, N, 2, 3)) ==
        std::vector<int>{2, 3});
  CHECK(analysis::homotopy_invariants(N, geometry::winding_map(d, N, -1, 0)) ==
        std::vector<int>{-1, 0});
}

TEST_CASE("higher spheres carry no invariants") {
  const TorusDomain d = TorusDomain::square(8);
  const TargetManifold N = TargetManifold::sphere(3);
  CHECK(analysis::homotopy_invariants(N, dhflow::geometry::winding_map(d, N, 1, 0)).empty());
}
