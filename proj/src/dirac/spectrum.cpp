#include "dhflow/dirac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dhflow/dirac/eigensolver.hpp"

namespace dhflow::dirac {

namespace {

// Weighted-L2 mass of psi beyond `cut` of the frequency window, per field.
TwistedSpinorField outer_band(const geometry::Spectral& sp, const TwistedSpinorField& psi,
                              double cut) {
  const TorusDomain& d = sp.domain();
  const double s0 = d.L1() / (std::numbers::pi * d.n1());
  const double s1 = d.L2() / (std::numbers::pi * d.n2());
  TwistedSpinorField out(psi.domain, psi.q);
  sp.spinor_filter(psi.values.data(), 2 * psi.q, [&](double k0, double k1) {
    return std::max(std::abs(k0) * s0, std::abs(k1) * s1) > cut ? 1.0 : 0.0;
  }, out.values.data());
  return out;
}

// Rotates each cluster of eigenvalues closer than `tol` so that the outer
// band mass is diagonal on it, then records mass and resolution per vector.
void classify_resolution(const DiracOperator& op, const SpectrumOptions& opt, double tol,
                         SpectralReport& rep) {
  const std::size_t k = rep.eigenvalues.size();
  rep.outer_mass.assign(k, 0.0);
  rep.resolved.assign(k, true);
  if (opt.max_outer_mass >= 1.0) return;
  const geometry::Spectral& sp = op.spectral();

  // Clusters in signed order; the kernel window is always one cluster.
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rep.eigenvalues[a] < rep.eigenvalues[b]; });
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t pos = 0; pos < k; ++pos) {
    const std::size_t i = order[pos];
    const bool joins = !clusters.empty() && [&] {
      const std::size_t j = clusters.back().back();
      const double a = rep.eigenvalues[i], b = rep.eigenvalues[j];
      return a - b <= tol || (std::abs(a) <= rep.tau_ker && std::abs(b) <= rep.tau_ker);
    }();
    if (joins) clusters.back().push_back(i);
    else clusters.push_back({i});
  }

  for (const auto& c : clusters) {
    const std::size_t m = c.size();
    std::vector<TwistedSpinorField> qv;
    for (std::size_t a : c) qv.push_back(outer_band(sp, rep.eigenvectors[a], opt.resolution_cut));
    Eigen::MatrixXcd M(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        M(a, b) = geometry::l2_inner(rep.eigenvectors[c[a]], qv[b]);
    M = 0.5 * (M + M.adjoint()).eval();
    double off = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) off = std::max(off, std::abs(M(a, b)));
    // Classification is unambiguous: keep the solver's vectors and eigenvalues.
    if (off <= 1e-3) {
      for (std::size_t a = 0; a < m; ++a) rep.outer_mass[c[a]] = M(a, a).real();
      continue;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const Eigen::MatrixXcd& U = es.eigenvectors();
    std::vector<TwistedSpinorField> rotated;
    std::vector<double> vals(m), res(m);
    for (std::size_t b = 0; b < m; ++b) {
      TwistedSpinorField w(op.domain(), op.q());
      double lam = 0.0, r2 = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        geometry::axpy(U(a, b), rep.eigenvectors[c[a]], w);
        const double p = std::norm(U(a, b));
        lam += p * rep.eigenvalues[c[a]];
        r2 += p * rep.residuals[c[a]] * rep.residuals[c[a]];
      }
      rotated.push_back(std::move(w));
      vals[b] = lam;
      res[b] = std::sqrt(r2);
    }
    for (std::size_t b = 0; b < m; ++b) {
      rep.eigenvectors[c[b]] = std::move(rotated[b]);
      rep.eigenvalues[c[b]] = vals[b];
      rep.residuals[c[b]] = res[b];
      rep.outer_mass[c[b]] = es.eigenvalues()(b);
    }
  }
  for (std::size_t i = 0; i < k; ++i) rep.resolved[i] = rep.outer_mass[i] <= opt.max_outer_mass;
}

}  // namespace

bool SpectralReport::minimal(double min_gap) const {
  return kernel_dim == 2 && std::isfinite(gap) && gap > min_gap;
}

double SpectralReport::pairing_defect() const {
  if (eigenvalues.empty()) return 0.0;
  double outer = 0.0;
  for (double v : eigenvalues) outer = std::max(outer, std::abs(v));
  const double cut = outer - 1e-8 * std::max(1.0, outer);
  std::vector<double> pos, neg;
  double defect = 0.0;
  for (double v : eigenvalues) {
    if (std::abs(v) >= cut) continue;
    if (std::abs(v) <= tau_ker) {
      // Kernel values pair with each other up to the threshold.
      defect = std::max(defect, std::abs(v));
      continue;
    }
    (v > 0 ? pos : neg).push_back(std::abs(v));
  }
  if (pos.size() != neg.size()) return std::numeric_limits<double>::infinity();
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  for (std::size_t i = 0; i < pos.size(); ++i) defect = std::max(defect, std::abs(pos[i] - neg[i]));
  return defect;
}

namespace {

SpectralReport spectrum_window(const DiracOperator& op, const SpectrumOptions& opt) {
  if (opt.k < 4) throw std::invalid_argument("compute_spectrum: k must be >= 4");
  if (opt.tau_ker < 0.0) throw std::invalid_argument("compute_spectrum: tau_ker must be > 0");
  const double rho = op.free_radius();
  const HermitianOperator& R = op.reduced();
  const std::size_t dim = R.dim();
  if (static_cast<std::size_t>(opt.k) > dim)
    throw std::invalid_argument("compute_spectrum: k exceeds operator dimension");

  SpectralReport rep;
  rep.tau_ker = opt.tau_ker > 0.0 ? opt.tau_ker : 1e-6 * rho;
  rep.spectral_radius = rho;

  EigenMethod method = opt.method;
  if (method == EigenMethod::Auto)
    method = dim <= opt.dense_max_dim ? EigenMethod::Dense : EigenMethod::Iterative;

  EigenPairs pairs;
  if (method == EigenMethod::Dense) {
    pairs = dense_nearest_zero(R, opt.k);
    rep.method = "dense";
  } else {
    LobpcgOptions lo;
    lo.k = opt.k;
    lo.tol = opt.tol > 0.0 ? opt.tol : 1e-11 * rho;
    lo.max_iter = opt.max_iter;
    lo.seed = opt.seed;
    std::vector<std::vector<cd>> warm;
    if (opt.warm) {
      const double s = std::sqrt(op.domain().cell_area());
      for (const auto& w : *opt.warm) {
        if (w.q != op.q() || w.nodes() != op.map().nodes()) continue;
        std::vector<cd> f(dim);
        op.restrict(w.values.data(), f.data());
        for (auto& c : f) c *= s;
        warm.push_back(std::move(f));
      }
      lo.warm = &warm;
    }
    pairs = lobpcg_nearest_zero(R, lo);
    rep.method = "lobpcg";
  }

  rep.eigenvalues = pairs.values;
  rep.residuals = pairs.residuals;
  rep.iterations = pairs.iterations;
  const double inv = 1.0 / std::sqrt(op.domain().cell_area());
  for (const auto& f : pairs.vectors) {
    TwistedSpinorField psi(op.domain(), op.q());
    op.lift(f.data(), psi.values.data());
    for (auto& c : psi.values) c *= inv;
    rep.eigenvectors.push_back(std::move(psi));
  }

  classify_resolution(op, opt, rep.tau_ker, rep);

  rep.kernel_dim = 0;
  rep.unresolved_kernel = 0;
  rep.gap = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    const double v = std::abs(rep.eigenvalues[i]);
    if (!rep.resolved[i]) {
      if (v <= rep.tau_ker) ++rep.unresolved_kernel;
    } else if (v <= rep.tau_ker) {
      ++rep.kernel_dim;
    } else if (!(v >= rep.gap)) {
      rep.gap = v;
    }
  }
  return rep;
}

}  // namespace

SpectralReport compute_spectrum(const DiracOperator& op, const SpectrumOptions& opt) {
  SpectralReport rep = spectrum_window(op, opt);
  // Doubler modes can fill the whole window near zero; widen it until a
  // resolved eigenvalue bounds the gap.
  SpectrumOptions wide = opt;
  const int cap = 8 * opt.k;
  while (!std::isfinite(rep.gap) && wide.k < cap &&
         static_cast<std::size_t>(wide.k) < op.reduced().dim()) {
    wide.k = static_cast<int>(std::min<std::size_t>(2 * wide.k, op.reduced().dim()));
    wide.warm = nullptr;
    rep = spectrum_window(op, wide);
  }
  return rep;
}

}  // namespace dhflow::dirac
