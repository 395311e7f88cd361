#include "dhflow/flow/terms.hpp"

#include <cmath>

#include "dhflow/dirac/operator.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::flow {

MapJet::MapJet(const geometry::Spectral& sp, const MapField& u) {
  const std::size_t len = u.values.size();
  d0.resize(len);
  d1.resize(len);
  d00.resize(len);
  d01.resize(len);
  d11.resize(len);
  lap.resize(len);
  sp.gradient(u.values.data(), u.q, d0.data(), d1.data());
  sp.hessian(u.values.data(), u.q, d00.data(), d01.data(), d11.data());
  sp.laplacian(u.values.data(), u.q, lap.data());
  grad_sq.assign(u.nodes(), 0.0);
  for (std::size_t x = 0; x < u.nodes(); ++x)
    for (int a = 0; a < u.q; ++a) {
      const std::size_t i = x * u.q + a;
      grad_sq[x] += d0[i] * d0[i] + d1[i] * d1[i];
    }
}

namespace {

void check_tube(const TargetManifold& N, const MapField& u) {
  for_each_index(u.nodes(), [&](std::size_t x) { N.check_in_tube(u.at(x)); });
}

}  // namespace

std::vector<double> f1_term(const TargetManifold& N, const MapField& u) {
  check_tube(N, u);
  const geometry::Spectral sp(u.domain);
  return f1_term(N, u, MapJet(sp, u));
}

std::vector<double> f1_term(const TargetManifold& N, const MapField& u, const MapJet& jet) {
  const int q = u.q;
  std::vector<double> out(u.values.size(), 0.0);
  for_each_index(u.nodes(), [&](std::size_t x) {
    std::vector<double> H(q * q * q);
    N.hessian(u.at(x), H.data());
    const double* a = jet.d0.data() + x * q;
    const double* b = jet.d1.data() + x * q;
    for (int A = 0; A < q; ++A) {
      double s = 0.0;
      for (int B = 0; B < q; ++B)
        for (int C = 0; C < q; ++C) s += H[(A * q + B) * q + C] * (a[B] * a[C] + b[B] * b[C]);
      out[x * q + A] = -s;
    }
  });
  return out;
}

std::vector<double> f2_term(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField& psi) {
  check_tube(N, u);
  const geometry::Spectral sp(u.domain);
  return f2_term(N, u, psi, MapJet(sp, u));
}

std::vector<double> f2_term(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField& psi, const MapJet& jet) {
  const int q = u.q;
  std::vector<double> out(u.values.size(), 0.0);
  for_each_index(u.nodes(), [&](std::size_t x) {
    std::vector<double> H(q * q * q), P(q * q);
    N.hessian(u.at(x), H.data());
    N.jacobian(u.at(x), P.data());
    const cd* ps = psi.at(x);
    const double* grad[2] = {jet.d0.data() + x * q, jet.d1.data() + x * q};
    // Rb[(beta * q + D) * q + F] = Re<psi^D, e_beta psi^F>.
    std::vector<double> Rb(2 * q * q);
    for (int beta = 0; beta < 2; ++beta)
      for (int F = 0; F < q; ++F) {
        const dirac::Spinor e = dirac::clifford_mul(beta + 1, {ps[F], ps[q + F]});
        for (int D = 0; D < q; ++D)
          Rb[(beta * q + D) * q + F] =
              (std::conj(ps[D]) * e[0] + std::conj(ps[q + D]) * e[1]).real();
      }
    // T^C_D = sum_{beta,E,F} pi^C_EF d_beta u^E Rb(beta, D, F).
    std::vector<double> T(q * q, 0.0);
    for (int C = 0; C < q; ++C)
      for (int beta = 0; beta < 2; ++beta)
        for (int F = 0; F < q; ++F) {
          double K = 0.0;
          for (int E = 0; E < q; ++E) K += H[(C * q + E) * q + F] * grad[beta][E];
          if (K == 0.0) continue;
          for (int D = 0; D < q; ++D) T[C * q + D] += K * Rb[(beta * q + D) * q + F];
        }
    std::vector<double> G(q, 0.0);
    for (int B = 0; B < q; ++B)
      for (int C = 0; C < q; ++C)
        for (int D = 0; D < q; ++D) G[B] += H[(C * q + B) * q + D] * T[C * q + D];
    for (int A = 0; A < q; ++A) {
      double s = 0.0;
      for (int B = 0; B < q; ++B) s += P[A * q + B] * G[B];
      out[x * q + A] = -s;
    }
  });
  return out;
}

std::vector<double> hessian_coupling(const MapJet& jet, int q) {
  const std::size_t nodes = jet.grad_sq.size();
  std::vector<double> out(nodes * q, 0.0);
  for_each_index(nodes, [&](std::size_t x) {
    const std::size_t o = x * q;
    // c_gamma = sum_{beta,B} d2_{beta gamma} u^B d_beta u^B.
    double c0 = 0.0, c1 = 0.0;
    for (int B = 0; B < q; ++B) {
      c0 += jet.d00[o + B] * jet.d0[o + B] + jet.d01[o + B] * jet.d1[o + B];
      c1 += jet.d01[o + B] * jet.d0[o + B] + jet.d11[o + B] * jet.d1[o + B];
    }
    for (int A = 0; A < q; ++A) out[o + A] = c0 * jet.d0[o + A] + c1 * jet.d1[o + A];
  });
  return out;
}

std::vector<double> alpha_weight(const MapJet& jet, double alpha) {
  std::vector<double> w(jet.grad_sq.size());
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = std::pow(1.0 + jet.grad_sq[x], alpha - 1.0);
  return w;
}

RhsParts map_rhs_parts(const TargetManifold& N, const MapField& u,
                       const TwistedSpinorField* psi, double alpha) {
  check_tube(N, u);
  const int q = u.q;
  const geometry::Spectral sp(u.domain);
  const MapJet jet(sp, u);
  RhsParts r;
  r.laplacian = jet.lap;
  r.coupling = hessian_coupling(jet, q);
  for (std::size_t x = 0; x < u.nodes(); ++x)
    for (int a = 0; a < q; ++a)
      r.coupling[x * q + a] *= 2.0 * (alpha - 1.0) / (1.0 + jet.grad_sq[x]);
  r.f1 = f1_term(N, u, jet);
  if (psi) {
    r.f2 = f2_term(N, u, *psi, jet);
    const std::vector<double> w = alpha_weight(jet, alpha);
    for (std::size_t x = 0; x < u.nodes(); ++x)
      for (int a = 0; a < q; ++a) r.f2[x * q + a] /= alpha * w[x];
  } else {
    r.f2.assign(u.values.size(), 0.0);
  }
  r.total.resize(u.values.size());
  for (std::size_t i = 0; i < r.total.size(); ++i)
    r.total[i] = r.laplacian[i] + r.coupling[i] + r.f1[i] + r.f2[i];
  return r;
}

std::vector<double> map_rhs(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField* psi, double alpha) {
  return map_rhs_parts(N, u, psi, alpha).total;
}

}  // namespace dhflow::flow
