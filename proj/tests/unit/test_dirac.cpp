#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dhflow/dirac/constraint.hpp"
#include "dhflow/dirac/eigensolver.hpp"
#include "dhflow/dirac/spectrum.hpp"
#include "dhflow/geometry/generators.hpp"
#include "helpers.hpp"

using namespace dhflow;
using dirac::DiracOperator;
using geometry::SpinBoundary;
using geometry::TargetManifold;
using geometry::TorusDomain;

namespace {

dirac::SpectralReport dense(const DiracOperator& op, int k) {
  dirac::SpectrumOptions o;
  o.k = k;
  o.method = dirac::EigenMethod::Dense;
  o.dense_max_dim = 1 << 20;
  return dirac::compute_spectrum(op, o);
}

}  // namespace

TEST_CASE("free operator: full spectrum is +-|k + s| on the frequency window") {
  const int n = 6;
  for (SpinBoundary b0 : {SpinBoundary::Periodic, SpinBoundary::Antiperiodic})
    for (SpinBoundary b1 : {SpinBoundary::Periodic, SpinBoundary::Antiperiodic}) {
      const geometry::SpinStructure spin{{b0, b1}};
      const TorusDomain d = TorusDomain::square(n, spin);
      std::vector<double> oracle;
      for (int k1 = -n / 2; k1 < n / 2; ++k1)
        for (int k2 = -n / 2; k2 < n / 2; ++k2) {
          const double m = std::hypot(k1 + spin.shift(0), k2 + spin.shift(1));
          oracle.push_back(m);
          oracle.push_back(-m);
        }
      std::sort(oracle.begin(), oracle.end());
      const std::vector<double> ev = dirac::dense_eigenvalues(dirac::FreeDiracOperator(d));
      REQUIRE(ev.size() == oracle.size());
      for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - oracle[i]) < 1e-12);
    }
}

TEST_CASE("constant map into S^2: kernel is two copies of the free kernel") {
  const TargetManifold N = TargetManifold::sphere(2);
  const TorusDomain d = TorusDomain::square(8);
  const DiracOperator op(N, geometry::constant_map(d, N, geometry::base_point(N)));
  const auto rep = dense(op, 8);
  CHECK(rep.kernel_dim == 4);
  CHECK(rep.gap == doctest::Approx(1.0));

  const TorusDomain da = TorusDomain::square(8, geometry::SpinStructure::antiperiodic());
  const DiracOperator opa(N, geometry::constant_map(da, N, geometry::base_point(N)));
  const auto repa = dense(opa, 8);
  CHECK(repa.kernel_dim == 0);
  CHECK(repa.gap == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("S^3 latitude of winding one: gap min(h, 1 - h)") {
  const TargetManifold N = TargetManifold::sphere(3);
  const TorusDomain d = TorusDomain::square(8);
  for (double h : {0.2, 0.35, 0.6}) {
    const DiracOperator op(N, dhtest::latitude_map(d, 1, h));
    const auto rep = dense(op, 12);
    CHECK(rep.kernel_dim == 2);
    CHECK(std::abs(rep.gap - std::min(h, 1.0 - h)) < 1e-10);
  }
}

TEST_CASE("S^3 latitude of winding two carries +-|1 - 2h| twice") {
  const TargetManifold N = TargetManifold::sphere(3);
  const TorusDomain d = TorusDomain::square(8);
  const double h = 0.3;
  const DiracOperator op(N, dhtest::latitude_map(d, 2, h));
  const auto rep = dense(op, 16);
  CHECK(rep.kernel_dim == 2);
  const double target = std::abs(1.0 - 2.0 * h);
  int plus = 0, minus = 0;
  for (double v : rep.eigenvalues) {
    if (std::abs(v - target) < 1e-10) ++plus;
    if (std::abs(v + target) < 1e-10) ++minus;
  }
  CHECK(plus == 2);
  CHECK(minus == 2);
}

TEST_CASE("doubler modes of an exact winding are excluded from the kernel") {
  // Exact winding into S^1 at n = 16 has four near-zero eigenvalues; two
  // live at the window edge.
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(16);
  const DiracOperator op(N, geometry::winding_map(d, N, 1, 0));
  const auto rep = dense(op, 12);
  int near_zero = 0;
  for (double v : rep.eigenvalues) near_zero += std::abs(v) <= rep.tau_ker ? 1 : 0;
  CHECK(near_zero == 4);
  CHECK(rep.kernel_dim == 2);
  CHECK(rep.unresolved_kernel == 2);
  CHECK(rep.minimal(1e-3));
}

TEST_CASE("dense and LOBPCG agree on the eigenvalues nearest zero") {
  const TargetManifold N = TargetManifold::sphere(2);
  const TorusDomain d = TorusDomain::square(12);
  geometry::Rng rng(21);
  const auto u = geometry::perturbed_map(geometry::constant_map(d, N, geometry::base_point(N)),
                                         N, 0.4, rng);
  const DiracOperator op(N, u);
  const auto a = dense(op, 8);
  dirac::SpectrumOptions o;
  o.k = 8;
  o.method = dirac::EigenMethod::Iterative;
  o.seed = 4;
  const auto b = dirac::compute_spectrum(op, o);
  CHECK(b.method == "lobpcg");
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  auto mags = [](std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto ma = mags(a.eigenvalues), mb = mags(b.eigenvalues);
  for (std::size_t i = 0; i < ma.size(); ++i) CHECK(std::abs(ma[i] - mb[i]) < 1e-8);
  CHECK(a.kernel_dim == b.kernel_dim);
}

TEST_CASE("kernel spinor is unit, tangent and annihilated") {
  const TargetManifold N = TargetManifold::circle_torus(1);
  const TorusDomain d = TorusDomain::square(12);
  const DiracOperator op(N, geometry::constant_map(d, N, geometry::base_point(N)));
  const auto rep = dense(op, 8);
  REQUIRE(rep.kernel_dim == 2);
  const auto psi = dirac::kernel_spinor(op, rep, 3);
  CHECK(geometry::l2_norm(psi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dirac::spinor_residual(op, psi) < 1e-10);
  CHECK(geometry::tangency_residual(psi, op.map(), N) < 1e-12);
}
