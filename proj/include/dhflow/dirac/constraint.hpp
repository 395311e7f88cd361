#pragma once

#include <cstdint>

#include "dhflow/dirac/spectrum.hpp"

namespace dhflow::dirac {

/// Below this pre-normalization norm the transported reference has left
/// the kernel's neighbourhood and the projection is reported as degenerate.
inline constexpr double kDefaultTauProj = 0.1;

struct ConstraintOptions {
  double tau_proj = kDefaultTauProj;
  SpectrumOptions spectrum;
};

struct ConstraintResult {
  TwistedSpinorField psi;
  SpectralReport report;
  /// ||Pi_ker P psi_ref|| before normalization.
  double projection_norm = 0.0;
  /// ||D psi||_{L2} of the returned spinor.
  double residual = 0.0;
};

/// Throws KernelNotMinimal unless the report has kernel dimension 2 and a
/// gap above 2 tau_ker.
void require_minimal(const SpectralReport& rep);

/// Orthogonal projector onto the span of the resolved eigenvectors with
/// |lambda| <= tau_ker (equal to the Riesz projector over a circle of
/// radius Lambda/2 when the kernel is isolated).
TwistedSpinorField kernel_projection(const SpectralReport& rep, const TwistedSpinorField& psi);

/// psi(u): transports psi_ref from pi(u_ref) to pi(u), projects onto the
/// kernel of the operator along u, normalizes, and rotates the complex phase
/// to maximize Re<psi, phase_ref> (skipped when phase_ref is null).
/// Errors: KernelNotMinimal, ProjectionDegenerate, TubeViolation,
/// EigensolveFailure.
ConstraintResult solve_constraint(const TargetManifold& N, const MapField& u,
                                  const MapField& u_ref, const TwistedSpinorField& psi_ref,
                                  const TwistedSpinorField* phase_ref,
                                  const ConstraintOptions& opt = {});

/// Same, reusing an operator along u and its spectrum.
ConstraintResult solve_constraint(const DiracOperator& op, const SpectralReport& rep,
                                  const MapField& u_ref, const TwistedSpinorField& psi_ref,
                                  const TwistedSpinorField* phase_ref, double tau_proj);

/// Deterministic unit kernel spinor: the kernel projection of a seeded
/// smooth tangent spinor. Basis independent, so dense and iterative solves
/// agree. Throws KernelNotMinimal / ProjectionDegenerate.
TwistedSpinorField kernel_spinor(const DiracOperator& op, const SpectralReport& rep,
                                 std::uint64_t seed = 0);

/// ||D psi||_{L2} with the assembled operator.
double spinor_residual(const DiracOperator& op, const TwistedSpinorField& psi);

}  // namespace dhflow::dirac
