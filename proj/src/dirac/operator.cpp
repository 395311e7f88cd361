#include "dhflow/dirac/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::dirac {

namespace {

// Componentwise e_beta d_beta on fields with layout (node*2 + s)*q + A.
void apply_free(const geometry::Spectral& sp, const cd* in, cd* out, int q) {
  const std::size_t nodes = sp.domain().nodes();
  const std::size_t stride = 2 * static_cast<std::size_t>(q);
  std::vector<cd> d0(nodes * stride), d1(nodes * stride);
  sp.spinor_gradient(in, 2 * q, d0.data(), d1.data());
  const cd I(0.0, 1.0);
  for_each_index(nodes, [&](std::size_t x) {
    const std::size_t o = x * stride;
    for (int a = 0; a < q; ++a) {
      const cd a0 = d0[o + a], a1 = d0[o + q + a];
      const cd b0 = d1[o + a], b1 = d1[o + q + a];
      out[o + a] = I * a1 + b1;
      out[o + q + a] = I * a0 - b0;
    }
  });
}

void check_tube(const TargetManifold& N, const MapField& u) {
  for_each_index(u.nodes(), [&](std::size_t x) { N.check_in_tube(u.at(x)); });
}

}  // namespace

SpinorField free_dirac(const SpinorField& psi) {
  SpinorField out(psi.domain);
  geometry::Spectral sp(psi.domain);
  apply_free(sp, psi.values.data(), out.values.data(), 1);
  return out;
}

TwistedSpinorField free_dirac(const TwistedSpinorField& psi) {
  TwistedSpinorField out(psi.domain, psi.q);
  geometry::Spectral sp(psi.domain);
  apply_free(sp, psi.values.data(), out.values.data(), psi.q);
  return out;
}

TwistedSpinorField dirac_along_map(const TargetManifold& N, const MapField& u,
                                   const TwistedSpinorField& psi, double tangency_tol) {
  check_tube(N, u);
  const double tres = geometry::tangency_residual(psi, u, N);
  const double scale = std::max(1.0, geometry::c0_norm(psi));
  if (tres > tangency_tol * scale) {
    std::ostringstream os;
    os << "spinor tangency residual " << tres << " exceeds " << tangency_tol * scale;
    throw TangencyViolation(os.str());
  }
  const int q = u.q;
  const std::size_t nodes = u.nodes();
  geometry::Spectral sp(u.domain);
  TwistedSpinorField out = free_dirac(psi);

  MapField p(u.domain, q);
  for_each_index(nodes, [&](std::size_t x) { N.project(u.at(x), p.at(x)); });
  std::vector<double> g0(nodes * q), g1(nodes * q);
  sp.gradient(p.values.data(), q, g0.data(), g1.data());

  for_each_index(nodes, [&](std::size_t x) {
    std::vector<double> J(q * q), H(q * q * q), X0(q, 0.0), X1(q, 0.0);
    N.jacobian(p.at(x), J.data());
    N.hessian(p.at(x), H.data());
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        X0[a] += J[a * q + b] * g0[x * q + b];
        X1[a] += J[a * q + b] * g1[x * q + b];
      }
    const cd* ps = psi.at(x);
    cd* o = out.at(x);
    for (int c = 0; c < q; ++c) {
      const Spinor e1 = clifford_mul(1, {ps[c], ps[q + c]});
      const Spinor e2 = clifford_mul(2, {ps[c], ps[q + c]});
      for (int a = 0; a < q; ++a) {
        double h0 = 0.0, h1 = 0.0;
        for (int b = 0; b < q; ++b) {
          const double h = H[(a * q + b) * q + c];
          h0 += h * X0[b];
          h1 += h * X1[b];
        }
        o[a] -= h0 * e1[0] + h1 * e2[0];
        o[q + a] -= h0 * e1[1] + h1 * e2[1];
      }
    }
  });
  return out;
}

void HermitianOperator::precondition(const cd* x, cd* y, double) const {
  std::copy(x, x + dim(), y);
}

FreeDiracOperator::FreeDiracOperator(const TorusDomain& d) : d_(d), sp_(d) {}

void FreeDiracOperator::apply(const cd* x, cd* y) const { apply_free(sp_, x, y, 1); }

void FreeDiracOperator::precondition(const cd* x, cd* y, double sigma) const {
  sp_.spinor_filter(x, 2, [sigma](double k0, double k1) { return 1.0 / (k0 * k0 + k1 * k1 + sigma); },
                    y);
}

class DiracOperator::Reduced final : public HermitianOperator {
 public:
  explicit Reduced(const DiracOperator& op) : op_(op) {}
  std::size_t dim() const override { return op_.reduced_dim(); }
  double spectral_radius() const override { return op_.free_radius(); }

  void apply(const cd* f, cd* g) const override {
    std::vector<cd> psi(op_.dim()), w(op_.dim());
    op_.lift(f, psi.data());
    apply_free(op_.sp_, psi.data(), w.data(), op_.q());
    op_.restrict(w.data(), g);
  }

  void precondition(const cd* f, cd* g, double sigma) const override {
    std::vector<cd> psi(op_.dim()), w(op_.dim());
    op_.lift(f, psi.data());
    op_.sp_.spinor_filter(
        psi.data(), 2 * op_.q(),
        [sigma](double k0, double k1) { return 1.0 / (k0 * k0 + k1 * k1 + sigma); }, w.data());
    op_.restrict(w.data(), g);
  }

 private:
  const DiracOperator& op_;
};

DiracOperator::~DiracOperator() = default;

DiracOperator::DiracOperator(const TargetManifold& N, const MapField& u, Options opt)
    : N_(N), u_(u), sp_(u.domain) {
  if (u.q != N.ambient_dim()) throw std::invalid_argument("map dimension does not match target");
  check_tube(N_, u_);
  mu_ = opt.mu_factor * sp_.spectral_radius();
  const int q = u.q, n = N.intrinsic_dim();
  P_.resize(u.nodes() * q * q);
  E_.resize(u.nodes() * q * n);
  for_each_index(u.nodes(), [&](std::size_t x) {
    std::vector<double> p(q);
    N_.project(u_.at(x), p.data());
    N_.jacobian(p.data(), P_.data() + x * q * q);
    N_.tangent_frame(p.data(), E_.data() + x * q * n);
  });
  reduced_ = std::make_unique<Reduced>(*this);
}

void DiracOperator::project(const cd* x, cd* y) const {
  const int q = u_.q;
  for_each_index(u_.nodes(), [&](std::size_t node) {
    const double* P = P_.data() + node * q * q;
    for (int s = 0; s < 2; ++s) {
      const cd* in = x + (node * 2 + s) * q;
      cd* o = y + (node * 2 + s) * q;
      for (int a = 0; a < q; ++a) {
        cd acc = 0.0;
        for (int b = 0; b < q; ++b) acc += P[a * q + b] * in[b];
        o[a] = acc;
      }
    }
  });
}

void DiracOperator::apply(const cd* x, cd* y) const {
  const std::size_t len = dim();
  std::vector<cd> t(len), w(len);
  project(x, t.data());
  apply_free(sp_, t.data(), w.data(), u_.q);
  project(w.data(), y);
  for_each_index(len, [&](std::size_t i) { y[i] += mu_ * (x[i] - t[i]); });
}

TwistedSpinorField DiracOperator::apply(const TwistedSpinorField& psi) const {
  TwistedSpinorField out(psi.domain, psi.q);
  apply(psi.values.data(), out.values.data());
  return out;
}

void DiracOperator::lift(const cd* f, cd* psi) const {
  const int q = u_.q, n = N_.intrinsic_dim();
  for_each_index(u_.nodes(), [&](std::size_t node) {
    const double* E = E_.data() + node * q * n;
    for (int s = 0; s < 2; ++s) {
      const cd* in = f + (node * 2 + s) * n;
      cd* o = psi + (node * 2 + s) * q;
      for (int a = 0; a < q; ++a) {
        cd acc = 0.0;
        for (int b = 0; b < n; ++b) acc += E[a * n + b] * in[b];
        o[a] = acc;
      }
    }
  });
}

void DiracOperator::restrict(const cd* psi, cd* f) const {
  const int q = u_.q, n = N_.intrinsic_dim();
  for_each_index(u_.nodes(), [&](std::size_t node) {
    const double* E = E_.data() + node * q * n;
    for (int s = 0; s < 2; ++s) {
      const cd* in = psi + (node * 2 + s) * q;
      cd* o = f + (node * 2 + s) * n;
      for (int b = 0; b < n; ++b) {
        cd acc = 0.0;
        for (int a = 0; a < q; ++a) acc += E[a * n + b] * in[a];
        o[b] = acc;
      }
    }
  });
}

std::vector<cd> assemble_dense(const HermitianOperator& op) {
  const std::size_t n = op.dim();
  std::vector<cd> A(n * n);
  // Columns are independent. Nested OpenMP regions inside apply() are
  // inactive by default, so each column runs serially on its thread.
  for_each_index(n, [&](std::size_t j) {
    std::vector<cd> e(n, 0.0);
    e[j] = 1.0;
    op.apply(e.data(), A.data() + j * n);
  });
  return A;
}

double hermiticity_residual(const HermitianOperator& op) {
  const std::size_t n = op.dim();
  const std::vector<cd> A = assemble_dense(op);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      num += std::norm(A[j * n + i] - std::conj(A[i * n + j]));
      den += std::norm(A[j * n + i]);
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace dhflow::dirac
