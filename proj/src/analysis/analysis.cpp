#include "dhflow/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dhflow/dirac/operator.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/geometry/spectral.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::analysis {

namespace {

struct Offset {
  int di, dj;
};

// Grid offsets within torus distance `radius`, each torus displacement once.
std::vector<Offset> ball_offsets(const TorusDomain& d, double radius) {
  const double h = std::max(d.spacing(0), d.spacing(1));
  if (radius < 2.0 * h * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "radius " << radius << " below two grid cells (" << 2.0 * h << ")";
    throw RadiusTooSmall(os.str());
  }
  std::vector<Offset> out;
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (int a = 0; a < d.n1(); ++a) {
    const int di = a <= d.n1() / 2 ? a : a - d.n1();
    const double dx = std::min(std::abs(di), d.n1() - std::abs(di)) * d.spacing(0);
    for (int b = 0; b < d.n2(); ++b) {
      const int dj = b <= d.n2() / 2 ? b : b - d.n2();
      const double dy = std::min(std::abs(dj), d.n2() - std::abs(dj)) * d.spacing(1);
      if (dx * dx + dy * dy <= r2) out.push_back({a, b});
    }
  }
  return out;
}

double ball_sum(const TorusDomain& d, const std::vector<double>& density,
                const std::vector<Offset>& ball, std::size_t center) {
  const int ci = static_cast<int>(center / d.n2()), cj = static_cast<int>(center % d.n2());
  double s = 0.0;
  for (const Offset& o : ball)
    s += density[d.node((ci + o.di) % d.n1(), (cj + o.dj) % d.n2())];
  return s * d.cell_area();
}

double wrap_angle(double a) {
  const double tp = 2.0 * std::numbers::pi;
  a = std::fmod(a, tp);
  if (a > std::numbers::pi) a -= tp;
  if (a <= -std::numbers::pi) a += tp;
  return a;
}

int winding_along(const MapField& u, int comp, int dir) {
  const TorusDomain& d = u.domain;
  const int n = d.resolution(dir);
  auto angle = [&](int t) {
    const double* v = u.at(dir == 0 ? d.node(t % n, 0) : d.node(0, t % n));
    return std::atan2(v[comp + 1], v[comp]);
  };
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    const double inc = wrap_angle(angle(t + 1) - angle(t));
    if (std::abs(inc) >= std::numbers::pi - 1e-9) {
      std::ostringstream os;
      os << "angle increment " << inc << " along generator " << dir + 1 << " reaches pi";
      throw AngleJumpTooLarge(os.str());
    }
    total += inc;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

// Signed solid angle of the spherical triangle (a, b, c), unit vectors.
double solid_angle(const double* a, const double* b, const double* c) {
  const double bc[3] = {b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2],
                        b[0] * c[1] - b[1] * c[0]};
  const double num = a[0] * bc[0] + a[1] * bc[1] + a[2] * bc[2];
  auto dot = [](const double* x, const double* y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; };
  const double den = 1.0 + dot(a, b) + dot(a, c) + dot(b, c);
  return 2.0 * std::atan2(num, den);
}

int sphere_degree(const MapField& u) {
  const TorusDomain& d = u.domain;
  std::vector<double> p(u.values.size());
  for (std::size_t x = 0; x < u.nodes(); ++x) {
    const double* v = u.at(x);
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (int a = 0; a < 3; ++a) p[x * 3 + a] = v[a] / r;
  }
  auto P = [&](int i, int j) { return p.data() + d.node(i % d.n1(), j % d.n2()) * 3; };
  const double total = ordered_sum(d.nodes(), [&](std::size_t x) {
    const int i = static_cast<int>(x / d.n2()), j = static_cast<int>(x % d.n2());
    return solid_angle(P(i, j), P(i + 1, j), P(i + 1, j + 1)) +
           solid_angle(P(i, j), P(i + 1, j + 1), P(i, j + 1));
  });
  const double deg = total / (4.0 * std::numbers::pi);
  const double k = std::round(deg);
  if (std::abs(deg - k) > 1e-6) {
    std::ostringstream os;
    os << "discrete degree " << deg << " is not within 1e-6 of an integer";
    throw DegreeNotNearInteger(os.str());
  }
  return static_cast<int>(k);
}

}  // namespace

std::vector<double> energy_density(const MapField& u) {
  const geometry::Spectral sp(u.domain);
  std::vector<double> d0(u.values.size()), d1(u.values.size());
  sp.gradient(u.values.data(), u.q, d0.data(), d1.data());
  std::vector<double> e(u.nodes(), 0.0);
  for (std::size_t x = 0; x < u.nodes(); ++x) {
    for (int a = 0; a < u.q; ++a) {
      const std::size_t i = x * u.q + a;
      e[x] += d0[i] * d0[i] + d1[i] * d1[i];
    }
    e[x] *= 0.5;
  }
  return e;
}

double local_energy(const TorusDomain& d, const std::vector<double>& density, std::size_t center,
                    double radius) {
  return ball_sum(d, density, ball_offsets(d, radius), center);
}

double local_energy(const MapField& u, std::size_t center, double radius) {
  return local_energy(u.domain, energy_density(u), center, radius);
}

std::vector<double> default_radii(const TorusDomain& d) {
  const double h = std::max(d.spacing(0), d.spacing(1));
  return {8.0 * h, 4.0 * h, 2.0 * h};
}

ConcentrationReport concentration_monitor(const TorusDomain& d,
                                          const std::vector<std::vector<double>>& densities,
                                          const std::vector<double>& radii, double threshold) {
  ConcentrationReport rep;
  rep.threshold = threshold;
  rep.radii = radii;
  const std::size_t nodes = d.nodes();
  for (double r : radii) {
    const std::vector<Offset> ball = ball_offsets(d, r);
    std::vector<double> low(nodes, densities.empty() ? 0.0 : HUGE_VAL);
    for (const auto& dens : densities)
      for_each_index(nodes, [&](std::size_t x) {
        low[x] = std::min(low[x], ball_sum(d, dens, ball, x));
      });
    rep.local.push_back(std::move(low));
  }
  if (densities.empty()) return rep;
  for (std::size_t x = 0; x < nodes; ++x) {
    bool all = true;
    for (const auto& l : rep.local) all = all && l[x] >= threshold;
    if (all) rep.flagged.push_back(x);
  }
  return rep;
}

ConcentrationReport concentration_monitor(const std::vector<MapField>& states,
                                          const std::vector<double>& radii, double threshold) {
  if (states.empty()) throw std::invalid_argument("concentration_monitor: no states");
  std::vector<std::vector<double>> dens;
  for (const auto& u : states) dens.push_back(energy_density(u));
  return concentration_monitor(states.front().domain, dens, radii, threshold);
}

SobolevNorms sobolev_diagnostic(const TargetManifold& N, const MapField& u,
                                const TwistedSpinorField& psi, double p) {
  const std::size_t nodes = u.nodes();
  const int w = 2 * psi.q;
  const geometry::Spectral sp(u.domain);
  std::vector<cd> g0(psi.values.size()), g1(psi.values.size());
  sp.spinor_gradient(psi.values.data(), w, g0.data(), g1.data());
  const dirac::DiracOperator op(N, u);
  const TwistedSpinorField Dpsi = op.apply(psi);
  auto node_norm = [&](const cd* v) {
    double s = 0.0;
    for (int c = 0; c < w; ++c) s += std::norm(v[c]);
    return std::sqrt(s);
  };
  const double a = u.domain.cell_area();
  const double lp = a * ordered_sum(nodes, [&](std::size_t x) {
    return std::pow(node_norm(psi.at(x)), p);
  });
  const double gp = a * ordered_sum(nodes, [&](std::size_t x) {
    const double n0 = node_norm(g0.data() + x * w), n1 = node_norm(g1.data() + x * w);
    return std::pow(std::sqrt(n0 * n0 + n1 * n1), p);
  });
  const double dp = a * ordered_sum(nodes, [&](std::size_t x) {
    return std::pow(node_norm(Dpsi.at(x)), p);
  });
  return {std::pow(lp + gp, 1.0 / p), std::pow(dp, 1.0 / p), std::pow(lp, 1.0 / p)};
}

std::vector<int> homotopy_invariants(const TargetManifold& N, const MapField& u) {
  std::vector<int> out;
  const bool circles = N.kind() == geometry::TargetKind::CircleTorus ||
                       (N.kind() == geometry::TargetKind::Sphere && N.intrinsic_dim() == 1);
  if (circles) {
    for (int c = 0; c < N.ambient_dim() / 2; ++c)
      for (int dir = 0; dir < 2; ++dir) out.push_back(winding_along(u, 2 * c, dir));
  } else if (N.intrinsic_dim() == 2) {
    out.push_back(sphere_degree(u));
  }
  return out;
}

}  // namespace dhflow::analysis
