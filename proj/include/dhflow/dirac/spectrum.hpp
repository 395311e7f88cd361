#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhflow/dirac/operator.hpp"

namespace dhflow::dirac {

enum class EigenMethod { Auto, Dense, Iterative };

struct SpectrumOptions {
  /// Number of eigenpairs nearest zero (>= 4).
  int k = 8;
  /// Kernel threshold; <= 0 selects 1e-6 * free spectral radius.
  double tau_ker = 0.0;
  EigenMethod method = EigenMethod::Auto;
  /// Auto uses the dense solver up to this reduced dimension.
  std::size_t dense_max_dim = 320;
  /// Iterative tolerance on |A v - lambda v| (Euclidean, unit v); <= 0
  /// selects 1e-11 * free spectral radius.
  double tol = 0.0;
  int max_iter = 500;
  std::uint64_t seed = 0;
  /// Warm start for the iterative solver (previous eigenvectors).
  const std::vector<TwistedSpinorField>* warm = nullptr;
  /// Resolution test: an eigenvector whose L2 mass beyond `resolution_cut`
  /// of the frequency window (max over directions of |k + s| / (n/2))
  /// exceeds `max_outer_mass` is unresolved and is left out of the kernel
  /// and the gap. Maps with winding make the pseudo-spectral twisted
  /// operator carry doubler-type modes at the window edge; they sit near
  /// zero but have no continuum counterpart. max_outer_mass >= 1 disables
  /// the test.
  double resolution_cut = 2.0 / 3.0;
  double max_outer_mass = 0.5;
};

/// Eigenvalues nearest zero sorted by |lambda|, kernel dimension
/// (#{resolved, |lambda| <= tau_ker}) and gap (smallest resolved |lambda|
/// above tau_ker).
/// Eigenvectors are orthonormal in the weighted L2 product.
struct SpectralReport {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  std::vector<TwistedSpinorField> eigenvectors;
  /// Fraction of each eigenvector's mass beyond the resolution cut. Within a
  /// cluster of eigenvalues closer than tau_ker the basis is rotated to
  /// diagonalize this quantity, so resolved and unresolved modes separate.
  std::vector<double> outer_mass;
  std::vector<bool> resolved;
  /// Kernel and gap count resolved eigenvectors only.
  int kernel_dim = 0;
  /// NaN when every returned eigenvalue lies inside the kernel threshold.
  double gap = 0.0;
  double tau_ker = 0.0;
  double spectral_radius = 0.0;
  int iterations = 0;
  std::string method;
  /// Unresolved eigenvectors with |lambda| <= tau_ker.
  int unresolved_kernel = 0;

  bool kernel_dim_even() const { return kernel_dim % 2 == 0; }
  /// Kernel of complex dimension 2 separated by more than `min_gap`.
  bool minimal(double min_gap) const;
  /// Largest |lambda_i + lambda_j| over the +- matching of the window. The
  /// outermost magnitude cluster may be cut by the window and is skipped;
  /// an unbalanced interior returns infinity.
  double pairing_defect() const;
};

/// The k eigenpairs nearest zero. When none of them is a resolved
/// non-kernel eigenvalue the window is doubled (up to 8k) so the gap is
/// defined; it stays NaN only past that cap. Throws std::invalid_argument
/// for k < 4 or tau_ker < 0, EigensolveFailure when the iterative solver
/// does not converge.
SpectralReport compute_spectrum(const DiracOperator& op, const SpectrumOptions& opt = {});

}  // namespace dhflow::dirac
