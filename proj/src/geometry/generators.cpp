#include "dhflow/geometry/generators.hpp"

#include <cmath>
#include <numbers>

namespace dhflow::geometry {

std::vector<double> smooth_random_field(const TorusDomain& d, int ncomp, int max_mode, Rng& rng,
                                        int min_mode) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> f(d.nodes() * ncomp, 0.0);
  const double tp = 2.0 * std::numbers::pi;
  for (int k1 = -max_mode; k1 <= max_mode; ++k1)
    for (int k2 = -max_mode; k2 <= max_mode; ++k2) {
      if (std::max(std::abs(k1), std::abs(k2)) < min_mode) continue;
      const double damp = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      for (int c = 0; c < ncomp; ++c) {
        const double a = damp * g(rng), b = damp * g(rng);
        for (int i = 0; i < d.n1(); ++i)
          for (int j = 0; j < d.n2(); ++j) {
            const double th = tp * (k1 * d.x(i) / d.L1() + k2 * d.y(j) / d.L2());
            f[d.node(i, j) * ncomp + c] += a * std::cos(th) + b * std::sin(th);
          }
      }
    }
  double m = 0.0;
  for (std::size_t x = 0; x < d.nodes(); ++x) {
    double s = 0.0;
    for (int c = 0; c < ncomp; ++c) s += f[x * ncomp + c] * f[x * ncomp + c];
    m = std::max(m, std::sqrt(s));
  }
  if (m > 0.0)
    for (auto& v : f) v /= m;
  return f;
}

std::vector<cd> smooth_random_spinor(const TorusDomain& d, int ncomp, int max_mode, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cd> f(d.nodes() * ncomp, 0.0);
  const double tp = 2.0 * std::numbers::pi;
  const double s0 = d.spin().shift(0), s1 = d.spin().shift(1);
  for (int k1 = -max_mode; k1 <= max_mode; ++k1)
    for (int k2 = -max_mode; k2 <= max_mode; ++k2) {
      const double kk1 = k1 + s0, kk2 = k2 + s1;
      const double damp = 1.0 / (1.0 + kk1 * kk1 + kk2 * kk2);
      for (int c = 0; c < ncomp; ++c) {
        const cd coef(damp * g(rng), damp * g(rng));
        for (int i = 0; i < d.n1(); ++i)
          for (int j = 0; j < d.n2(); ++j) {
            const double th = tp * (kk1 * d.x(i) / d.L1() + kk2 * d.y(j) / d.L2());
            f[d.node(i, j) * ncomp + c] += coef * cd(std::cos(th), std::sin(th));
          }
      }
    }
  const double nrm = std::sqrt(l2_inner(d, f.data(), f.data(), f.size()).real());
  if (nrm > 0.0)
    for (auto& v : f) v /= nrm;
  return f;
}

Vec base_point(const TargetManifold& N) {
  Vec p = Vec::Zero(N.ambient_dim());
  if (N.kind() == TargetKind::Sphere) {
    p[0] = N.radius();
  } else {
    for (int f = 0; f < N.intrinsic_dim(); ++f) p[2 * f] = N.radius();
  }
  return p;
}

MapField constant_map(const TorusDomain& d, const TargetManifold& N, const Vec& p) {
  MapField u(d, N.ambient_dim());
  for (std::size_t x = 0; x < d.nodes(); ++x)
    for (int a = 0; a < u.q; ++a) u.at(x)[a] = p[a];
  return u;
}

MapField winding_map(const TorusDomain& d, const TargetManifold& N, int k1, int k2) {
  MapField u = constant_map(d, N, base_point(N));
  const double tp = 2.0 * std::numbers::pi;
  for (int i = 0; i < d.n1(); ++i)
    for (int j = 0; j < d.n2(); ++j) {
      const double th = tp * (k1 * d.x(i) / d.L1() + k2 * d.y(j) / d.L2());
      double* v = u.at(d.node(i, j));
      v[0] = N.radius() * std::cos(th);
      v[1] = N.radius() * std::sin(th);
    }
  return u;
}

MapField perturbed_map(const MapField& u, const TargetManifold& N, double amplitude, Rng& rng,
                       int max_mode, int min_mode) {
  const std::vector<double> eta = smooth_random_field(u.domain, u.q, max_mode, rng, min_mode);
  MapField z = u;
  for (std::size_t i = 0; i < z.values.size(); ++i) z.values[i] += amplitude * eta[i];
  return project_map(z, N);
}

TwistedSpinorField random_tangent_spinor(const MapField& u, const TargetManifold& N, Rng& rng,
                                         int max_mode) {
  TwistedSpinorField psi(u.domain, u.q);
  psi.values = smooth_random_spinor(u.domain, 2 * u.q, max_mode, rng);
  psi = project_tangent(psi, u, N);
  scale(psi, 1.0 / l2_norm(psi));
  return psi;
}

}  // namespace dhflow::geometry
