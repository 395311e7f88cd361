#include "dhflow/geometry/target.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dhflow/errors.hpp"

namespace dhflow::geometry {

namespace {

// Every target is a product of round spheres ("blocks"): one block of
// dimension q for Sn, n blocks of dimension 2 for the circle torus.
struct Blocks {
  int count;
  int dim;
};

double block_norm(const double* z, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += z[a] * z[a];
  return std::sqrt(s);
}

double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TargetManifold::TargetManifold(TargetKind kind, int n, int q, double r)
    : kind_(kind), n_(n), q_(q), r_(r), delta_(0.5 * r) {}

TargetManifold TargetManifold::sphere(int n, double r) {
  if (n < 1 || !(r > 0.0)) throw std::invalid_argument("sphere needs n >= 1 and r > 0");
  return TargetManifold(TargetKind::Sphere, n, n + 1, r);
}

TargetManifold TargetManifold::circle_torus(int n, double r) {
  if (n < 1 || !(r > 0.0)) throw std::invalid_argument("circle torus needs n >= 1 and r > 0");
  return TargetManifold(TargetKind::CircleTorus, n, 2 * n, r);
}

void TargetManifold::set_tube_radius(double delta) {
  if (!(delta > 0.0) || !(delta * weingarten_bound() < 1.0)) {
    std::ostringstream os;
    os << "tube radius " << delta << " violates 0 < delta < 1/C = " << 1.0 / weingarten_bound();
    throw ConstantsSchemeViolation(os.str());
  }
  delta_ = delta;
}

double TargetManifold::injectivity_radius() const { return std::numbers::pi * r_; }

static Blocks blocks_of(TargetKind kind, int n, int q) {
  return kind == TargetKind::Sphere ? Blocks{1, q} : Blocks{n, 2};
}

double TargetManifold::distance_to_target(const double* z) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  double s = 0.0;
  for (int f = 0; f < b.count; ++f) {
    const double d = block_norm(z + f * b.dim, b.dim) - r_;
    s += d * d;
  }
  return std::sqrt(s);
}

void TargetManifold::project(const double* z, double* out) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  for (int f = 0; f < b.count; ++f) {
    const double* zb = z + f * b.dim;
    const double s = r_ / block_norm(zb, b.dim);
    for (int a = 0; a < b.dim; ++a) out[f * b.dim + a] = s * zb[a];
  }
}

void TargetManifold::jacobian(const double* z, double* J) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  std::fill(J, J + q_ * q_, 0.0);
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double rho = block_norm(z + o, b.dim);
    const double c = r_ / rho;
    for (int a = 0; a < b.dim; ++a)
      for (int bb = 0; bb < b.dim; ++bb)
        J[(o + a) * q_ + o + bb] =
            c * ((a == bb ? 1.0 : 0.0) - z[o + a] * z[o + bb] / (rho * rho));
  }
}

void TargetManifold::hessian(const double* z, double* H) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  std::fill(H, H + q_ * q_ * q_, 0.0);
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double* zb = z + o;
    const double rho = block_norm(zb, b.dim);
    const double c3 = r_ / (rho * rho * rho);
    const double c5 = 3.0 * r_ / (rho * rho * rho * rho * rho);
    for (int a = 0; a < b.dim; ++a)
      for (int bb = 0; bb < b.dim; ++bb)
        for (int c = 0; c < b.dim; ++c) {
          double v = 0.0;
          if (a == bb) v -= zb[c];
          if (a == c) v -= zb[bb];
          if (bb == c) v -= zb[a];
          H[((o + a) * q_ + o + bb) * q_ + o + c] = c3 * v + c5 * zb[a] * zb[bb] * zb[c];
        }
  }
}

void TargetManifold::tangent_frame(const double* p, double* E) const {
  std::fill(E, E + q_ * n_, 0.0);
  if (kind_ == TargetKind::CircleTorus) {
    for (int f = 0; f < n_; ++f) {
      const double rho = block_norm(p + 2 * f, 2);
      E[(2 * f) * n_ + f] = -p[2 * f + 1] / rho;
      E[(2 * f + 1) * n_ + f] = p[2 * f] / rho;
    }
    return;
  }
  // Householder reflection H with H e_k = sgn * p/|p|; the other columns of H
  // are an orthonormal basis of the tangent space.
  const double rho = block_norm(p, q_);
  int k = 0;
  for (int a = 1; a < q_; ++a)
    if (std::abs(p[a]) > std::abs(p[k])) k = a;
  const double sgn = p[k] >= 0.0 ? 1.0 : -1.0;
  std::vector<double> w(q_);
  for (int a = 0; a < q_; ++a) w[a] = p[a] / rho;
  w[k] += sgn;
  const double ww = dot(w.data(), w.data(), q_);
  int col = 0;
  for (int j = 0; j < q_; ++j) {
    if (j == k) continue;
    for (int a = 0; a < q_; ++a)
      E[a * n_ + col] = (a == j ? 1.0 : 0.0) - 2.0 * w[a] * w[j] / ww;
    ++col;
  }
}

void TargetManifold::transport(const double* p, const double* q, const double* X,
                               double* out) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double coef = dot(X + o, q + o, b.dim) / (r_ * r_ + dot(p + o, q + o, b.dim));
    for (int a = 0; a < b.dim; ++a) out[o + a] = X[o + a] - coef * (p[o + a] + q[o + a]);
  }
}

Vec TargetManifold::project(const Vec& z) const {
  if (z.size() != q_) throw std::invalid_argument("ambient dimension mismatch");
  const Blocks b = blocks_of(kind_, n_, q_);
  const double d = distance_to_target(z.data());
  bool degenerate = false;
  for (int f = 0; f < b.count; ++f)
    degenerate = degenerate || block_norm(z.data() + f * b.dim, b.dim) <= 1e-12 * r_;
  if (d > reach() || degenerate) {
    std::ostringstream os;
    os << "point at distance " << d << " from target is outside the projection domain (reach "
       << reach() << ")";
    throw TubeViolation(os.str());
  }
  Vec out(q_);
  project(z.data(), out.data());
  return out;
}

Mat TargetManifold::jacobian(const Vec& z) const {
  project(z);  // domain check
  Mat J(q_, q_);
  std::vector<double> buf(q_ * q_);
  jacobian(z.data(), buf.data());
  for (int a = 0; a < q_; ++a)
    for (int b = 0; b < q_; ++b) J(a, b) = buf[a * q_ + b];
  return J;
}

std::vector<double> TargetManifold::hessian(const Vec& z) const {
  project(z);
  std::vector<double> H(q_ * q_ * q_);
  hessian(z.data(), H.data());
  return H;
}

bool TargetManifold::on_target(const Vec& p, double tol) const {
  return p.size() == q_ && distance_to_target(p.data()) <= tol;
}

bool TargetManifold::is_tangent(const Vec& p, const Vec& X, double tol) const {
  const Blocks b = blocks_of(kind_, n_, q_);
  const double scale = std::max(1.0, X.norm());
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double nrm = dot(p.data() + o, X.data() + o, b.dim) / block_norm(p.data() + o, b.dim);
    if (std::abs(nrm) > tol * scale) return false;
  }
  return true;
}

namespace {

void require_on_target(const TargetManifold& N, const Vec& p) {
  if (!N.on_target(p, 1e-10)) {
    std::ostringstream os;
    os << "point is not on the target (distance " << N.distance_to_target(p.data()) << ")";
    throw NotTangent(os.str());
  }
}

void require_tangent(const TargetManifold& N, const Vec& p, const Vec& X, double tol,
                     const char* what) {
  if (!N.is_tangent(p, X, tol)) throw NotTangent(std::string(what) + " is not tangent at p");
}

}  // namespace

Vec TargetManifold::second_fundamental_form(const Vec& p, const Vec& X, const Vec& Y,
                                            double tol) const {
  require_on_target(*this, p);
  require_tangent(*this, p, X, tol, "X");
  require_tangent(*this, p, Y, tol, "Y");
  std::vector<double> H(q_ * q_ * q_);
  hessian(p.data(), H.data());
  Vec out = Vec::Zero(q_);
  for (int a = 0; a < q_; ++a)
    for (int b = 0; b < q_; ++b)
      for (int c = 0; c < q_; ++c) out[a] += H[(a * q_ + b) * q_ + c] * X[b] * Y[c];
  return out;
}

Vec TargetManifold::exp_map(const Vec& p, const Vec& V) const {
  require_on_target(*this, p);
  require_tangent(*this, p, V, 1e-10, "V");
  const Blocks b = blocks_of(kind_, n_, q_);
  Vec out(q_);
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double nv = block_norm(V.data() + o, b.dim);
    const double th = nv / r_;
    for (int a = 0; a < b.dim; ++a) {
      const double dir = nv > 0.0 ? V[o + a] / nv : 0.0;
      out[o + a] = std::cos(th) * p[o + a] + r_ * std::sin(th) * dir;
    }
  }
  return out;
}

Vec TargetManifold::log_map(const Vec& p, const Vec& q) const {
  require_on_target(*this, p);
  require_on_target(*this, q);
  const Blocks b = blocks_of(kind_, n_, q_);
  Vec out(q_);
  for (int f = 0; f < b.count; ++f) {
    const int o = f * b.dim;
    const double c = dot(p.data() + o, q.data() + o, b.dim) / (r_ * r_);
    double wn = 0.0;
    for (int a = 0; a < b.dim; ++a) {
      out[o + a] = q[o + a] - c * p[o + a];
      wn += out[o + a] * out[o + a];
    }
    wn = std::sqrt(wn);
    const double th = std::atan2(wn / r_, c);
    if (th > std::numbers::pi - 1e-8)
      throw BeyondInjectivity("points are (nearly) antipodal; shortest geodesic not unique");
    const double s = wn > 0.0 ? r_ * th / wn : 0.0;
    for (int a = 0; a < b.dim; ++a) out[o + a] *= s;
  }
  return out;
}

double TargetManifold::geodesic_distance(const Vec& p, const Vec& q) const {
  return log_map(p, q).norm();
}

Vec TargetManifold::parallel_transport(const Vec& p, const Vec& q, const Vec& X,
                                       double tol) const {
  require_tangent(*this, p, X, tol, "X");
  log_map(p, q);  // injectivity check
  Vec out(q_);
  transport(p.data(), q.data(), X.data(), out.data());
  return out;
}

double TargetManifold::distance_ratio(const Vec& p, const Vec& q) const {
  const double chord = (p - q).norm();
  if (chord == 0.0) return 1.0;
  return geodesic_distance(p, q) / chord;
}

void TargetManifold::check_in_tube(const double* z) const {
  const double d = distance_to_target(z);
  if (!(d <= delta_)) {
    std::ostringstream os;
    os << "point at distance " << d << " leaves the tube of radius " << delta_;
    throw TubeViolation(os.str());
  }
}

}  // namespace dhflow::geometry
