#pragma once

#include "dhflow/geometry/target.hpp"

namespace dhflow::geometry {

/// Constants (delta0, epsilon, delta, R) of the local Lipschitz construction.
///
/// delta0 bounds the region where the distance comparison holds, epsilon is
/// the geodesic scale, delta the tube used for transport and R the radius of
/// the map ball. `delta` here is independent of TargetManifold::tube_radius().
struct ConstantsScheme {
  double delta0;
  double epsilon;
  double delta;
  double R;

  /// Sphere-exact defaults scaled by the target radius:
  /// delta0 = r/2, epsilon = r, delta = R = r/10.
  static ConstantsScheme defaults_for(const TargetManifold& N);

  /// Throws ConstantsSchemeViolation unless 2 epsilon < inj(N),
  /// delta < min(delta0/4, epsilon (1 - delta0 C)/4) and R <= delta.
  void validate(const TargetManifold& N) const;
};

}  // namespace dhflow::geometry
