#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "dhflow/geometry/fields.hpp"
#include "dhflow/geometry/spectral.hpp"
#include "dhflow/geometry/target.hpp"

namespace dhflow::dirac {

using geometry::MapField;
using geometry::SpinorField;
using geometry::TargetManifold;
using geometry::TorusDomain;
using geometry::TwistedSpinorField;

using Spinor = std::array<cd, 2>;

/// Clifford multiplication with e1 = i sigma1, e2 = i sigma2 (beta = 1 or 2).
/// Skew-adjoint, squares to -1, e1 e2 = -e2 e1.
inline Spinor clifford_mul(int beta, const Spinor& s) {
  const cd I(0.0, 1.0);
  if (beta == 1) return {I * s[1], I * s[0]};
  return {s[1], -s[0]};
}

/// Free Dirac operator e_beta d_beta by Fourier differentiation with the
/// domain's spin structure.
SpinorField free_dirac(const SpinorField& psi);
/// Componentwise free Dirac operator on a twisted field (no connection term).
TwistedSpinorField free_dirac(const TwistedSpinorField& psi);

/// Dirac operator along pi(u):
///   psi^A -> dslash psi^A - pi^A_BC(pi(u)) X_beta^B e_beta psi^C,
/// with X_beta = P d_beta(pi o u) the tangential part of the spectral
/// gradient. Throws TubeViolation when u leaves the tube and
/// TangencyViolation when psi is not tangent to `tangency_tol`.
TwistedSpinorField dirac_along_map(const TargetManifold& N, const MapField& u,
                                   const TwistedSpinorField& psi, double tangency_tol = 1e-9);

/// Matrix-free Hermitian operator on C^dim.
class HermitianOperator {
 public:
  virtual ~HermitianOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(const cd* x, cd* y) const = 0;
  /// Approximation of (A^2 + sigma)^{-1}; identity by default.
  virtual void precondition(const cd* x, cd* y, double sigma) const;
  /// Upper bound on |lambda|.
  virtual double spectral_radius() const = 0;
};

/// The free Dirac operator on untwisted spinors as a HermitianOperator.
class FreeDiracOperator final : public HermitianOperator {
 public:
  explicit FreeDiracOperator(const TorusDomain& d);
  std::size_t dim() const override { return 2 * d_.nodes(); }
  void apply(const cd* x, cd* y) const override;
  void precondition(const cd* x, cd* y, double sigma) const override;
  double spectral_radius() const override { return sp_.spectral_radius(); }

 private:
  TorusDomain d_;
  geometry::Spectral sp_;
};

/// Twisted Dirac operator along u, assembled on the full ambient-coefficient
/// space as  A = Pi dslash Pi + mu_off (I - Pi).
///
/// On tangent spinors A agrees with Pi applied to dirac_along_map: the
/// connection term is normal-valued there (the hessian of pi is fully
/// symmetric for spheres and circle products), so Pi removes it.
/// Eigen-solves run on the reduced operator E* dslash E in orthonormal
/// tangent-frame coordinates, which is unitarily equivalent to A on range Pi.
class DiracOperator final : public HermitianOperator {
 public:
  ~DiracOperator() override;
  struct Options {
    /// mu_off = mu_factor * free spectral radius.
    double mu_factor = 10.0;
  };

  /// Throws TubeViolation when u leaves the tube of N.
  DiracOperator(const TargetManifold& N, const MapField& u, Options opt);
  DiracOperator(const TargetManifold& N, const MapField& u)
      : DiracOperator(N, u, Options{}) {}
  // The reduced view points back at this object.
  DiracOperator(const DiracOperator&) = delete;
  DiracOperator& operator=(const DiracOperator&) = delete;

  const TargetManifold& target() const { return N_; }
  const MapField& map() const { return u_; }
  const TorusDomain& domain() const { return u_.domain; }
  int q() const { return u_.q; }
  int n() const { return N_.intrinsic_dim(); }
  double mu_off() const { return mu_; }
  /// Spectral radius of the free operator (sets the scale of tau_ker).
  double free_radius() const { return sp_.spectral_radius(); }

  std::size_t dim() const override { return 2 * static_cast<std::size_t>(u_.q) * u_.nodes(); }
  void apply(const cd* x, cd* y) const override;
  double spectral_radius() const override { return std::max(mu_, free_radius()); }

  TwistedSpinorField apply(const TwistedSpinorField& psi) const;
  /// Pi psi.
  void project(const cd* x, cd* y) const;

  std::size_t reduced_dim() const {
    return 2 * static_cast<std::size_t>(n()) * u_.nodes();
  }
  /// f (frame coordinates, layout (node*2+s)*n + a) -> ambient E f.
  void lift(const cd* f, cd* psi) const;
  /// Ambient psi -> E* psi.
  void restrict(const cd* psi, cd* f) const;
  /// The reduced operator E* dslash E.
  const HermitianOperator& reduced() const { return *reduced_; }

  const geometry::Spectral& spectral() const { return sp_; }

 private:
  class Reduced;

  TargetManifold N_;
  MapField u_;
  geometry::Spectral sp_;
  double mu_;
  std::vector<double> P_;  // q*q per node
  std::vector<double> E_;  // q*n per node
  std::unique_ptr<const HermitianOperator> reduced_;
};

/// Dense matrix of an operator, built column by column.
std::vector<cd> assemble_dense(const HermitianOperator& op);
/// ||A - A*||_F / ||A||_F for the dense assembly.
double hermiticity_residual(const HermitianOperator& op);

}  // namespace dhflow::dirac
