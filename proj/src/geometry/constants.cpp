#include "dhflow/geometry/constants.hpp"

#include <algorithm>
#include <sstream>

#include "dhflow/errors.hpp"

namespace dhflow::geometry {

ConstantsScheme ConstantsScheme::defaults_for(const TargetManifold& N) {
  const double r = N.radius();
  return {0.5 * r, r, 0.1 * r, 0.1 * r};
}

void ConstantsScheme::validate(const TargetManifold& N) const {
  const double C = N.weingarten_bound();
  std::ostringstream os;
  if (!(delta0 > 0.0 && epsilon > 0.0 && delta > 0.0 && R > 0.0))
    os << "constants must be positive; ";
  if (!(delta0 * C < 1.0)) os << "delta0*C = " << delta0 * C << " must be < 1; ";
  if (!(2.0 * epsilon < N.injectivity_radius()))
    os << "2*epsilon = " << 2.0 * epsilon << " must be < inj(N) = " << N.injectivity_radius()
       << "; ";
  const double cap = std::min(delta0 / 4.0, epsilon * (1.0 - delta0 * C) / 4.0);
  if (!(delta < cap)) os << "delta = " << delta << " must be < " << cap << "; ";
  if (!(R <= delta)) os << "R = " << R << " must be <= delta = " << delta << "; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw ConstantsSchemeViolation("constants scheme: " + msg);
}

}  // namespace dhflow::geometry
