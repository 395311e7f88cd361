#include "dhflow/geometry/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "dhflow/kernels.hpp"

namespace dhflow::geometry {

namespace {

struct PlanKey {
  int n1, n2, ncomp, sign;
  auto operator<=>(const PlanKey&) const = default;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; FFTW owns them.
fftw_plan get_plan(int n1, int n2, int ncomp, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const PlanKey key{n1, n2, ncomp, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int n[2] = {n1, n2};
  const std::size_t len = static_cast<std::size_t>(n1) * n2 * ncomp;
  fftw_complex* a = fftw_alloc_complex(len);
  fftw_complex* b = fftw_alloc_complex(len);
  fftw_plan p = fftw_plan_many_dft(2, n, ncomp, a, nullptr, ncomp, 1, b, nullptr, ncomp, 1, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(key, p);
  return p;
}

int signed_index(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

}  // namespace

Spectral::Spectral(const TorusDomain& d) : d_(d) {
  auto make_phase = [&](int dir) {
    std::vector<cd> ph;
    const double s = d_.spin().shift(dir);
    if (s == 0.0) return ph;
    const int n = d_.resolution(dir);
    ph.resize(n);
    for (int j = 0; j < n; ++j) {
      const double a = -2.0 * std::numbers::pi * s * j / n;
      ph[j] = cd(std::cos(a), std::sin(a));
    }
    return ph;
  };
  phase0_ = make_phase(0);
  phase1_ = make_phase(1);
}

void Spectral::forward(const cd* in, cd* out, int ncomp) const {
  fftw_execute_dft(get_plan(d_.n1(), d_.n2(), ncomp, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Spectral::backward(const cd* in, cd* out, int ncomp) const {
  fftw_execute_dft(get_plan(d_.n1(), d_.n2(), ncomp, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double inv = 1.0 / static_cast<double>(d_.nodes());
  const std::size_t len = d_.nodes() * ncomp;
  for (std::size_t i = 0; i < len; ++i) out[i] *= inv;
}

double Spectral::wavenumber(int dir, int idx) const {
  const int n = d_.resolution(dir);
  return 2.0 * std::numbers::pi / d_.length(dir) * signed_index(idx, n);
}

double Spectral::spinor_wavenumber(int dir, int idx) const {
  const int n = d_.resolution(dir);
  return 2.0 * std::numbers::pi / d_.length(dir) * (signed_index(idx, n) + d_.spin().shift(dir));
}

double Spectral::spectral_radius() const {
  double s = 0.0;
  for (int dir = 0; dir < 2; ++dir) {
    const int n = d_.resolution(dir);
    double m = 0.0;
    for (int idx = 0; idx < n; ++idx) m = std::max(m, std::abs(spinor_wavenumber(dir, idx)));
    s += m * m;
  }
  return std::sqrt(s);
}

void Spectral::gradient(const double* f, int ncomp, double* d0, double* d1) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len), b(len);
  for (std::size_t i = 0; i < len; ++i) a[i] = f[i];
  forward(a.data(), fh.data(), ncomp);
  for (int dir = 0; dir < 2; ++dir) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const int idx = dir == 0 ? i : j;
        const int n = dir == 0 ? n1 : n2;
        const double k = idx == n / 2 ? 0.0 : wavenumber(dir, idx);
        const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
        for (int c = 0; c < ncomp; ++c) a[o + c] = cd(0.0, k) * fh[o + c];
      }
    backward(a.data(), b.data(), ncomp);
    double* out = dir == 0 ? d0 : d1;
    for (std::size_t i = 0; i < len; ++i) out[i] = b[i].real();
  }
}

void Spectral::hessian(const double* f, int ncomp, double* d00, double* d01,
                       double* d11) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len), b(len);
  for (std::size_t i = 0; i < len; ++i) a[i] = f[i];
  forward(a.data(), fh.data(), ncomp);
  double* outs[3] = {d00, d01, d11};
  for (int which = 0; which < 3; ++which) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double k0 = i == n1 / 2 ? 0.0 : wavenumber(0, i);
        const double k1 = j == n2 / 2 ? 0.0 : wavenumber(1, j);
        const double m = which == 0 ? -k0 * k0 : which == 1 ? -k0 * k1 : -k1 * k1;
        const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
        for (int c = 0; c < ncomp; ++c) a[o + c] = m * fh[o + c];
      }
    backward(a.data(), b.data(), ncomp);
    for (std::size_t i = 0; i < len; ++i) outs[which][i] = b[i].real();
  }
}

void Spectral::laplacian(const double* f, int ncomp, double* out) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len);
  for (std::size_t i = 0; i < len; ++i) a[i] = f[i];
  forward(a.data(), fh.data(), ncomp);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const double k0 = wavenumber(0, i), k1 = wavenumber(1, j);
      const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
      for (int c = 0; c < ncomp; ++c) fh[o + c] *= -(k0 * k0 + k1 * k1);
    }
  backward(fh.data(), a.data(), ncomp);
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i].real();
}

void Spectral::solve_helmholtz(const double* rhs, int ncomp, double dt, double* out) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len);
  for (std::size_t i = 0; i < len; ++i) a[i] = rhs[i];
  forward(a.data(), fh.data(), ncomp);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const double k0 = wavenumber(0, i), k1 = wavenumber(1, j);
      const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
      const double m = 1.0 / (1.0 + dt * (k0 * k0 + k1 * k1));
      for (int c = 0; c < ncomp; ++c) fh[o + c] *= m;
    }
  backward(fh.data(), a.data(), ncomp);
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i].real();
}

void Spectral::twist(const cd* in, cd* out, int ncomp, double sign) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      cd ph = 1.0;
      if (!phase0_.empty()) ph *= sign > 0 ? phase0_[i] : std::conj(phase0_[i]);
      if (!phase1_.empty()) ph *= sign > 0 ? phase1_[j] : std::conj(phase1_[j]);
      const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
      for (int c = 0; c < ncomp; ++c) out[o + c] = ph * in[o + c];
    }
}

// An antiperiodic field psi equals e^{2 pi i s x/L} phi with phi periodic, so
// derivatives act on phi with the shifted symbol i 2 pi (k + s)/L.
void Spectral::spinor_gradient(const cd* f, int ncomp, cd* d0, cd* d1) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len), b(len);
  twist(f, a.data(), ncomp, +1.0);
  forward(a.data(), fh.data(), ncomp);
  for (int dir = 0; dir < 2; ++dir) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double k = dir == 0 ? spinor_wavenumber(0, i) : spinor_wavenumber(1, j);
        const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
        for (int c = 0; c < ncomp; ++c) a[o + c] = cd(0.0, k) * fh[o + c];
      }
    backward(a.data(), b.data(), ncomp);
    twist(b.data(), dir == 0 ? d0 : d1, ncomp, -1.0);
  }
}

void Spectral::spinor_filter(const cd* f, int ncomp,
                             const std::function<double(double, double)>& symbol,
                             cd* out) const {
  const int n1 = d_.n1(), n2 = d_.n2();
  const std::size_t len = d_.nodes() * ncomp;
  std::vector<cd> a(len), fh(len);
  twist(f, a.data(), ncomp, +1.0);
  forward(a.data(), fh.data(), ncomp);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const double m = symbol(spinor_wavenumber(0, i), spinor_wavenumber(1, j));
      const std::size_t o = (static_cast<std::size_t>(i) * n2 + j) * ncomp;
      for (int c = 0; c < ncomp; ++c) fh[o + c] *= m;
    }
  backward(fh.data(), a.data(), ncomp);
  twist(a.data(), out, ncomp, -1.0);
}

}  // namespace dhflow::geometry
