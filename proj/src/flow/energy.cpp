#include "dhflow/flow/energy.hpp"

#include <cmath>

#include "dhflow/kernels.hpp"

namespace dhflow::flow {

namespace {

std::vector<double> grad_sq(const MapField& u) {
  const geometry::Spectral sp(u.domain);
  std::vector<double> d0(u.values.size()), d1(u.values.size());
  sp.gradient(u.values.data(), u.q, d0.data(), d1.data());
  std::vector<double> g(u.nodes(), 0.0);
  for (std::size_t x = 0; x < u.nodes(); ++x)
    for (int a = 0; a < u.q; ++a) {
      const std::size_t i = x * u.q + a;
      g[x] += d0[i] * d0[i] + d1[i] * d1[i];
    }
  return g;
}

}  // namespace

std::vector<double> energy_density(const MapField& u) {
  std::vector<double> g = grad_sq(u);
  for (double& v : g) v *= 0.5;
  return g;
}

double energy_alpha(const MapField& u, double alpha) {
  const std::vector<double> g = grad_sq(u);
  const double a = u.domain.cell_area();
  return 0.5 * a * ordered_sum(g.size(), [&](std::size_t x) { return std::pow(1.0 + g[x], alpha); });
}

double dirichlet_energy(const MapField& u) {
  const std::vector<double> g = grad_sq(u);
  const double a = u.domain.cell_area();
  return 0.5 * a * ordered_sum(g.size(), [&](std::size_t x) { return g[x]; });
}

double action(const TargetManifold& N, const MapField& u, const TwistedSpinorField& psi,
              double alpha) {
  const dirac::DiracOperator op(N, u);
  return energy_alpha(u, alpha) + 0.5 * geometry::l2_inner(psi, op.apply(psi)).real();
}

ElResidual el_residual(const TargetManifold& N, const MapField& u, const TwistedSpinorField* psi,
                       double alpha) {
  const int q = u.q;
  const RhsParts r = map_rhs_parts(N, u, psi, alpha);
  const geometry::Spectral sp(u.domain);
  const MapJet jet(sp, u);
  const std::vector<double> w = alpha_weight(jet, alpha);
  const double a = u.domain.cell_area();
  ElResidual out;
  out.map = std::sqrt(a * ordered_sum(u.nodes(), [&](std::size_t x) {
    std::vector<double> P(q * q);
    N.jacobian(u.at(x), P.data());
    double s = 0.0;
    for (int A = 0; A < q; ++A) {
      double t = 0.0;
      for (int B = 0; B < q; ++B) t += P[A * q + B] * r.total[x * q + B];
      s += t * t;
    }
    return w[x] * w[x] * s;
  }));
  if (psi) {
    const dirac::DiracOperator op(N, u);
    out.spinor = geometry::l2_norm(op.apply(*psi));
  }
  return out;
}

}  // namespace dhflow::flow
