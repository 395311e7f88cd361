#pragma once

#include "dhflow/flow/terms.hpp"

namespace dhflow::flow {

struct FdComparison {
  double analytic = 0.0;
  double finite_difference = 0.0;
  /// |analytic - fd| / max(|analytic|, |fd|); 0 when both vanish.
  double rel_error = 0.0;
};

/// Compares -alpha <w * map_rhs, P eta>_{L2} with the central difference
///   [L^alpha(pi(u + t eta)) - L^alpha(pi(u - t eta))] / 2t.
/// With a spinor, psi is re-solved at both perturbed maps (kernel spinor
/// with psi as reference), so the spinor part of L^alpha contributes its
/// constrained value. `psi` may be null.
FdComparison variational_consistency_check(const TargetManifold& N, const MapField& u,
                                           const TwistedSpinorField* psi, double alpha,
                                           const std::vector<double>& eta, double t);

/// Directional derivative of Q(s) = <psi, D(pi(u + s v)) psi>_{L2} at s = 0
/// by Richardson-extrapolated central differences (steps s and s/2),
/// against 2 <-F2(u, psi), v>_{L2}. psi must be tangent along u; it need not
/// lie in the kernel.
FdComparison curvature_pairing_check(const TargetManifold& N, const MapField& u,
                                     const TwistedSpinorField& psi, const std::vector<double>& v,
                                     double s);

}  // namespace dhflow::flow
