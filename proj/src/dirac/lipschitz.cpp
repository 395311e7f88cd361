#include "dhflow/dirac/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dhflow/geometry/generators.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::dirac {

void check_within_injectivity(const TargetManifold& N, const MapField& u, const MapField& v) {
  const int q = u.q;
  for_each_index(u.nodes(), [&](std::size_t x) {
    const geometry::Vec p = N.project(Eigen::Map<const geometry::Vec>(u.at(x), q));
    const geometry::Vec r = N.project(Eigen::Map<const geometry::Vec>(v.at(x), q));
    N.log_map(p, r);  // throws BeyondInjectivity
  });
}

double operator_lipschitz_check(const TargetManifold& N, const MapField& u, const MapField& v,
                                int trials, std::uint64_t seed) {
  check_within_injectivity(N, u, v);
  const double duv = geometry::c0_distance(u, v);
  if (duv == 0.0) return 0.0;
  const DiracOperator Du(N, u), Dv(N, v);
  geometry::Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const TwistedSpinorField psi = geometry::random_tangent_spinor(v, N, rng, 3);
    const TwistedSpinorField there = geometry::transport_spinor(psi, v, u, N);
    TwistedSpinorField back = geometry::transport_spinor(Du.apply(there), u, v, N);
    geometry::axpy(-1.0, Dv.apply(psi), back);
    worst = std::max(worst, geometry::l2_norm(back) / (duv * geometry::l2_norm(psi)));
  }
  return worst;
}

double holonomy_check(const TargetManifold& N, const MapField& u0, const MapField& u,
                      const MapField& v, int trials, std::uint64_t seed) {
  check_within_injectivity(N, u0, u);
  check_within_injectivity(N, u, v);
  check_within_injectivity(N, v, u0);
  const double duv = geometry::c0_distance(u, v);
  if (duv == 0.0) return 0.0;
  const int q = u.q, n = N.intrinsic_dim();
  const std::size_t nodes = u.nodes();
  // Per-node random coefficients drawn serially so the result is policy independent.
  std::vector<double> coef(nodes * trials * n);
  geometry::Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& c : coef) c = g(rng);
  std::vector<double> ratio(nodes, 0.0);
  for_each_index(nodes, [&](std::size_t x) {
    std::vector<double> p0(q), p1(q), p2(q), E(q * n), Z(q), a(q), b(q), c(q);
    N.project(u0.at(x), p0.data());
    N.project(u.at(x), p1.data());
    N.project(v.at(x), p2.data());
    N.tangent_frame(p0.data(), E.data());
    for (int t = 0; t < trials; ++t) {
      const double* w = coef.data() + (x * trials + t) * n;
      for (int A = 0; A < q; ++A) {
        Z[A] = 0.0;
        for (int k = 0; k < n; ++k) Z[A] += E[A * n + k] * w[k];
      }
      N.transport(p0.data(), p1.data(), Z.data(), a.data());
      N.transport(p1.data(), p2.data(), a.data(), b.data());
      N.transport(p2.data(), p0.data(), b.data(), c.data());
      double num = 0.0, den = 0.0;
      for (int A = 0; A < q; ++A) {
        num += (c[A] - Z[A]) * (c[A] - Z[A]);
        den += Z[A] * Z[A];
      }
      if (den > 0.0) ratio[x] = std::max(ratio[x], std::sqrt(num / den) / duv);
    }
  });
  return *std::max_element(ratio.begin(), ratio.end());
}

}  // namespace dhflow::dirac
