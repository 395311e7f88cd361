#pragma once

#include <vector>

#include <Eigen/Core>

namespace dhflow::geometry {

enum class TargetKind { Sphere, CircleTorus };

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Closed target N embedded in R^q: a round sphere S^n of radius r in
/// R^(n+1), or the product of n circles of radius r in R^(2n).
///
/// Raw-pointer members are the hot paths used by field kernels; they assume
/// their arguments are valid (no tube or tangency checks) unless stated.
/// The Vec-valued members are the checked public operations.
///
/// Tensor layouts: jacobian J[A*q + B] = d pi^A / dz^B, hessian
/// H[(A*q + B)*q + C] = d^2 pi^A / dz^B dz^C, tangent frame E[A*n + a].
class TargetManifold {
 public:
  static TargetManifold sphere(int n, double r = 1.0);
  static TargetManifold circle_torus(int n, double r = 1.0);

  TargetKind kind() const { return kind_; }
  int ambient_dim() const { return q_; }
  int intrinsic_dim() const { return n_; }
  double radius() const { return r_; }

  /// Tube radius delta used by the distance comparison and the flow's
  /// tube checks. Defaults to r/2; must stay below 1/C.
  double tube_radius() const { return delta_; }
  void set_tube_radius(double delta);
  /// Bound C on the norm of the shape operator (1/r for both kinds).
  double weingarten_bound() const { return 1.0 / r_; }
  /// Reach of N: the nearest-point projection is unique within this
  /// distance. Equal to r for both kinds.
  double reach() const { return r_; }
  double injectivity_radius() const;

  // Fast paths.
  double distance_to_target(const double* z) const;
  void project(const double* z, double* out) const;
  void jacobian(const double* z, double* J) const;
  void hessian(const double* z, double* H) const;
  /// Orthonormal basis of T_pN for p on N.
  void tangent_frame(const double* p, double* E) const;
  /// Parallel transport along the shortest geodesic from p to q, applied to
  /// any vector X (linear in X; maps T_pN isometrically onto T_qN).
  void transport(const double* p, const double* q, const double* X, double* out) const;

  // Checked operations.
  /// Nearest point on N. Throws TubeViolation if z is farther than the reach.
  Vec project(const Vec& z) const;
  Mat jacobian(const Vec& z) const;
  /// Flattened hessian tensor (layout above).
  std::vector<double> hessian(const Vec& z) const;
  bool on_target(const Vec& p, double tol = 1e-10) const;
  bool is_tangent(const Vec& p, const Vec& X, double tol = 1e-10) const;
  Vec second_fundamental_form(const Vec& p, const Vec& X, const Vec& Y,
                              double tol = 1e-10) const;
  Vec exp_map(const Vec& p, const Vec& V) const;
  Vec log_map(const Vec& p, const Vec& q) const;
  double geodesic_distance(const Vec& p, const Vec& q) const;
  Vec parallel_transport(const Vec& p, const Vec& q, const Vec& X,
                         double tol = 1e-10) const;
  /// d^N(p,q) / |p - q|, with the p == q limit reported as 1.
  double distance_ratio(const Vec& p, const Vec& q) const;

  /// Throws TubeViolation unless d(z, N) <= tube_radius().
  void check_in_tube(const double* z) const;

 private:
  TargetManifold(TargetKind kind, int n, int q, double r);

  TargetKind kind_;
  int n_;
  int q_;
  double r_;
  double delta_;
};

}  // namespace dhflow::geometry
