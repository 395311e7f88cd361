#include "dhflow/geometry/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dhflow/kernels.hpp"

namespace dhflow::geometry {

double on_target_residual(const MapField& u, const TargetManifold& N) {
  std::vector<double> r(u.nodes());
  for_each_index(u.nodes(), [&](std::size_t x) { r[x] = N.distance_to_target(u.at(x)); });
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

bool on_target(const MapField& u, const TargetManifold& N, double tol) {
  return on_target_residual(u, N) <= tol;
}

double c0_distance(const MapField& u, const MapField& v) {
  if (u.values.size() != v.values.size()) throw std::invalid_argument("map size mismatch");
  double m = 0.0;
  for (std::size_t x = 0; x < u.nodes(); ++x) {
    double s = 0.0;
    for (int a = 0; a < u.q; ++a) {
      const double d = u.at(x)[a] - v.at(x)[a];
      s += d * d;
    }
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

MapField project_map(const MapField& u, const TargetManifold& N) {
  MapField out(u.domain, u.q);
  for_each_index(u.nodes(), [&](std::size_t x) {
    Vec z = Eigen::Map<const Vec>(u.at(x), u.q);
    Vec p = N.project(z);
    std::copy(p.data(), p.data() + u.q, out.at(x));
  });
  return out;
}

double l2_inner(const MapField& a, const MapField& b) {
  const int q = a.q;
  return a.domain.cell_area() * ordered_sum(a.nodes(), [&](std::size_t x) {
           double s = 0.0;
           for (int c = 0; c < q; ++c) s += a.at(x)[c] * b.at(x)[c];
           return s;
         });
}

cd l2_inner(const TorusDomain& d, const cd* a, const cd* b, std::size_t len) {
  cd s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += std::conj(a[i]) * b[i];
  return d.cell_area() * s;
}

cd l2_inner(const SpinorField& a, const SpinorField& b) {
  return l2_inner(a.domain, a.values.data(), b.values.data(), a.values.size());
}

cd l2_inner(const TwistedSpinorField& a, const TwistedSpinorField& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("spinor size mismatch");
  return l2_inner(a.domain, a.values.data(), b.values.data(), a.values.size());
}

double l2_norm(const SpinorField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a).real())); }

double l2_norm(const TwistedSpinorField& a) {
  return std::sqrt(std::max(0.0, l2_inner(a, a).real()));
}

double c0_norm(const TwistedSpinorField& a) {
  const std::size_t stride = 2 * static_cast<std::size_t>(a.q);
  double m = 0.0;
  for (std::size_t x = 0; x < a.nodes(); ++x) {
    double s = 0.0;
    for (std::size_t i = 0; i < stride; ++i) s += std::norm(a.values[x * stride + i]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

void scale(TwistedSpinorField& a, cd c) {
  for (auto& v : a.values) v *= c;
}

void axpy(cd a, const TwistedSpinorField& x, TwistedSpinorField& y) {
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

TwistedSpinorField project_tangent(const TwistedSpinorField& psi, const MapField& u,
                                   const TargetManifold& N) {
  const int q = psi.q;
  TwistedSpinorField out(psi.domain, q);
  for_each_index(psi.nodes(), [&](std::size_t x) {
    std::vector<double> p(q), J(q * q);
    N.project(u.at(x), p.data());
    N.jacobian(p.data(), J.data());
    for (int s = 0; s < 2; ++s) {
      const cd* in = psi.at(x) + s * q;
      cd* o = out.at(x) + s * q;
      for (int a = 0; a < q; ++a) {
        cd acc = 0.0;
        for (int b = 0; b < q; ++b) acc += J[a * q + b] * in[b];
        o[a] = acc;
      }
    }
  });
  return out;
}

double tangency_residual(const TwistedSpinorField& psi, const MapField& u,
                         const TargetManifold& N) {
  const TwistedSpinorField t = project_tangent(psi, u, N);
  const std::size_t stride = 2 * static_cast<std::size_t>(psi.q);
  double m = 0.0;
  for (std::size_t x = 0; x < psi.nodes(); ++x) {
    double s = 0.0;
    for (std::size_t i = 0; i < stride; ++i)
      s += std::norm(psi.values[x * stride + i] - t.values[x * stride + i]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

TwistedSpinorField transport_spinor(const TwistedSpinorField& psi, const MapField& from,
                                    const MapField& to, const TargetManifold& N) {
  const int q = psi.q;
  TwistedSpinorField out(psi.domain, q);
  for_each_index(psi.nodes(), [&](std::size_t x) {
    std::vector<double> p(q), pp(q), re(q), im(q), tre(q), tim(q);
    N.project(from.at(x), p.data());
    N.project(to.at(x), pp.data());
    for (int s = 0; s < 2; ++s) {
      const cd* in = psi.at(x) + s * q;
      for (int a = 0; a < q; ++a) {
        re[a] = in[a].real();
        im[a] = in[a].imag();
      }
      N.transport(p.data(), pp.data(), re.data(), tre.data());
      N.transport(p.data(), pp.data(), im.data(), tim.data());
      cd* o = out.at(x) + s * q;
      for (int a = 0; a < q; ++a) o[a] = cd(tre[a], tim[a]);
    }
  });
  return out;
}

}  // namespace dhflow::geometry
