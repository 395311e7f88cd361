#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dhflow/geometry/domain.hpp"

namespace dhflow::geometry {

/// Fourier-spectral calculus on a TorusDomain.
///
/// Fields are node-major with `ncomp` interleaved components
/// (f[node * ncomp + c]); every component is transformed in one batched FFT.
///
/// Conventions at the Nyquist index n/2 (signed wavenumber -n/2):
///  - first derivatives of real fields zero the Nyquist mode, so the
///    derivative of a real field stays real and is skew-adjoint;
///  - the Laplacian and the implicit solve keep -k^2 there;
///  - spinor derivatives keep the multiplier i(2 pi/L)(-n/2 + s), so the
///    free Dirac spectrum is exactly {+-|k + s|} on the grid window.
///
/// Plans are created once per (grid, ncomp) under a global lock; execution
/// is thread-safe and deterministic.
class Spectral {
 public:
  using cd = std::complex<double>;

  explicit Spectral(const TorusDomain& d);

  const TorusDomain& domain() const { return d_; }

  void gradient(const double* f, int ncomp, double* d0, double* d1) const;
  void laplacian(const double* f, int ncomp, double* out) const;
  /// Second derivatives d00, d01, d11 (Nyquist-zeroed first-derivative symbols
  /// composed, so d00 + d11 differs from the Laplacian only at Nyquist).
  void hessian(const double* f, int ncomp, double* d00, double* d01, double* d11) const;
  /// Solves (I - dt * Laplacian) out = rhs.
  void solve_helmholtz(const double* rhs, int ncomp, double dt, double* out) const;

  /// Derivatives of a spinor-type field in both directions, honoring the
  /// spin structure of the domain.
  void spinor_gradient(const cd* f, int ncomp, cd* d0, cd* d1) const;
  /// Multiplies every component by symbol(kappa0, kappa1), where kappa is the
  /// shifted physical wavenumber used for spinors.
  void spinor_filter(const cd* f, int ncomp,
                     const std::function<double(double, double)>& symbol, cd* out) const;

  /// max |kappa| over the spinor frequency window.
  double spectral_radius() const;
  /// Physical spinor wavenumber 2 pi (k + s) / L for raw FFT index `idx`.
  double spinor_wavenumber(int dir, int idx) const;
  /// Physical wavenumber for real fields; Nyquist returns -n/2 scaled.
  double wavenumber(int dir, int idx) const;

 private:
  void forward(const cd* in, cd* out, int ncomp) const;
  void backward(const cd* in, cd* out, int ncomp) const;
  void twist(const cd* in, cd* out, int ncomp, double sign) const;

  TorusDomain d_;
  std::vector<cd> phase0_;  // e^{-2 pi i s x / L} per direction, empty if s = 0
  std::vector<cd> phase1_;
};

}  // namespace dhflow::geometry
