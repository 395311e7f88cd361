#include "dhflow/geometry/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dhflow::geometry {

TorusDomain::TorusDomain(int n1, int n2, double L1, double L2, SpinStructure spin)
    : n1_(n1), n2_(n2), L1_(L1), L2_(L2), spin_(spin) {
  if (n1 < 4 || n2 < 4 || n1 % 2 != 0 || n2 % 2 != 0)
    throw std::invalid_argument("grid resolution must be even and >= 4, got " +
                                std::to_string(n1) + "x" + std::to_string(n2));
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("side lengths must be positive");
}

double TorusDomain::torus_distance(std::size_t a, std::size_t b) const {
  const int ia = static_cast<int>(a / n2_), ja = static_cast<int>(a % n2_);
  const int ib = static_cast<int>(b / n2_), jb = static_cast<int>(b % n2_);
  int di = std::abs(ia - ib), dj = std::abs(ja - jb);
  di = std::min(di, n1_ - di);
  dj = std::min(dj, n2_ - dj);
  return std::hypot(di * spacing(0), dj * spacing(1));
}

}  // namespace dhflow::geometry
