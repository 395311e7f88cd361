#include "dhflow/dirac/constraint.hpp"

#include <cmath>
#include <sstream>

#include "dhflow/errors.hpp"
#include "dhflow/geometry/generators.hpp"

namespace dhflow::dirac {

using geometry::l2_inner;
using geometry::l2_norm;

void require_minimal(const SpectralReport& rep) {
  if (rep.minimal(2.0 * rep.tau_ker)) return;
  std::ostringstream os;
  os << "kernel not minimal: dim " << rep.kernel_dim << ", gap " << rep.gap << ", tau_ker "
     << rep.tau_ker;
  throw KernelNotMinimal(os.str(), rep.kernel_dim, rep.gap);
}

TwistedSpinorField kernel_projection(const SpectralReport& rep, const TwistedSpinorField& psi) {
  TwistedSpinorField out(psi.domain, psi.q);
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    if (std::abs(rep.eigenvalues[i]) > rep.tau_ker || !rep.resolved[i]) continue;
    const auto& v = rep.eigenvectors[i];
    geometry::axpy(l2_inner(v, psi), v, out);
  }
  return out;
}

double spinor_residual(const DiracOperator& op, const TwistedSpinorField& psi) {
  return l2_norm(op.apply(psi));
}

namespace {

ConstraintResult finish(const DiracOperator& op, const SpectralReport& rep,
                        const TwistedSpinorField& transported,
                        const TwistedSpinorField* phase_ref, double tau_proj) {
  ConstraintResult res{kernel_projection(rep, transported), rep, 0.0, 0.0};
  res.projection_norm = l2_norm(res.psi);
  if (!(res.projection_norm >= tau_proj)) {
    std::ostringstream os;
    os << "kernel projection norm " << res.projection_norm << " below " << tau_proj;
    throw ProjectionDegenerate(os.str(), res.projection_norm);
  }
  geometry::scale(res.psi, 1.0 / res.projection_norm);
  if (phase_ref) {
    // Re<e^{i theta} psi, ref> is maximal when e^{i theta} = c / |c|.
    const cd c = l2_inner(res.psi, *phase_ref);
    if (std::abs(c) > 0.0) geometry::scale(res.psi, c / std::abs(c));
  }
  res.residual = spinor_residual(op, res.psi);
  return res;
}

}  // namespace

ConstraintResult solve_constraint(const DiracOperator& op, const SpectralReport& rep,
                                  const MapField& u_ref, const TwistedSpinorField& psi_ref,
                                  const TwistedSpinorField* phase_ref, double tau_proj) {
  require_minimal(rep);
  const TwistedSpinorField moved =
      geometry::transport_spinor(psi_ref, u_ref, op.map(), op.target());
  return finish(op, rep, moved, phase_ref, tau_proj);
}

ConstraintResult solve_constraint(const TargetManifold& N, const MapField& u,
                                  const MapField& u_ref, const TwistedSpinorField& psi_ref,
                                  const TwistedSpinorField* phase_ref,
                                  const ConstraintOptions& opt) {
  const DiracOperator op(N, u);
  const SpectralReport rep = compute_spectrum(op, opt.spectrum);
  return solve_constraint(op, rep, u_ref, psi_ref, phase_ref, opt.tau_proj);
}

TwistedSpinorField kernel_spinor(const DiracOperator& op, const SpectralReport& rep,
                                 std::uint64_t seed) {
  require_minimal(rep);
  geometry::Rng rng(seed);
  const TwistedSpinorField ref =
      geometry::random_tangent_spinor(op.map(), op.target(), rng, 2);
  return finish(op, rep, ref, nullptr, 1e-6).psi;
}

}  // namespace dhflow::dirac
