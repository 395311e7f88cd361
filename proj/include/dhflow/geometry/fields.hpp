#pragma once

#include <complex>
#include <vector>

#include "dhflow/geometry/domain.hpp"
#include "dhflow/geometry/target.hpp"

namespace dhflow {

using cd = std::complex<double>;

namespace geometry {

/// Discrete map u: grid -> R^q, values[node * q + A].
struct MapField {
  TorusDomain domain;
  int q;
  std::vector<double> values;

  MapField(const TorusDomain& d, int q_)
      : domain(d), q(q_), values(d.nodes() * static_cast<std::size_t>(q_), 0.0) {}

  double* at(std::size_t node) { return values.data() + node * q; }
  const double* at(std::size_t node) const { return values.data() + node * q; }
  std::size_t nodes() const { return domain.nodes(); }
};

/// max over nodes of |u(x) - pi(u(x))|.
double on_target_residual(const MapField& u, const TargetManifold& N);
bool on_target(const MapField& u, const TargetManifold& N, double tol);
/// max over nodes of |u(x) - v(x)|.
double c0_distance(const MapField& u, const MapField& v);
/// Nodewise nearest-point projection; throws TubeViolation outside the reach.
MapField project_map(const MapField& u, const TargetManifold& N);
double l2_inner(const MapField& a, const MapField& b);

/// Untwisted spinor field, values[node * 2 + s].
struct SpinorField {
  TorusDomain domain;
  std::vector<cd> values;

  explicit SpinorField(const TorusDomain& d) : domain(d), values(d.nodes() * 2) {}
};

/// Spinor field with values in R^q: psi = psi^A (x) d_A.
/// Layout values[(node * 2 + s) * q + A]; row-major by node, then spinor
/// component, then ambient index.
struct TwistedSpinorField {
  TorusDomain domain;
  int q;
  std::vector<cd> values;

  TwistedSpinorField(const TorusDomain& d, int q_)
      : domain(d), q(q_), values(d.nodes() * 2 * static_cast<std::size_t>(q_)) {}

  cd* at(std::size_t node) { return values.data() + node * 2 * q; }
  const cd* at(std::size_t node) const { return values.data() + node * 2 * q; }
  std::size_t nodes() const { return domain.nodes(); }
};

/// Weighted L2 products (conjugate-linear in the first argument).
cd l2_inner(const SpinorField& a, const SpinorField& b);
cd l2_inner(const TwistedSpinorField& a, const TwistedSpinorField& b);
double l2_norm(const SpinorField& a);
double l2_norm(const TwistedSpinorField& a);
/// Weighted L2 product of raw arrays of equal length.
cd l2_inner(const TorusDomain& d, const cd* a, const cd* b, std::size_t len);
/// max over nodes of the Euclidean norm of the node value.
double c0_norm(const TwistedSpinorField& a);

void scale(TwistedSpinorField& a, cd c);
void axpy(cd a, const TwistedSpinorField& x, TwistedSpinorField& y);

/// Projection of each component onto T_{pi(u(x))}N.
TwistedSpinorField project_tangent(const TwistedSpinorField& psi, const MapField& u,
                                   const TargetManifold& N);
/// max over nodes of |psi(x) - P psi(x)| (Euclidean over spinor and ambient).
double tangency_residual(const TwistedSpinorField& psi, const MapField& u,
                         const TargetManifold& N);

/// Pointwise parallel transport of psi, tangent along pi(from), to pi(to).
TwistedSpinorField transport_spinor(const TwistedSpinorField& psi, const MapField& from,
                                    const MapField& to, const TargetManifold& N);

}  // namespace geometry
}  // namespace dhflow
