#pragma once

#include <cstdint>

#include "dhflow/dirac/operator.hpp"

namespace dhflow::dirac {

/// Throws BeyondInjectivity when pi(u(x)) and pi(v(x)) are not joined by a
/// unique shortest geodesic at some node.
void check_within_injectivity(const TargetManifold& N, const MapField& u, const MapField& v);

/// max over random tangent psi along pi(v) of
///   ||P^{u,v} D^u P^{v,u} psi - D^v psi||_{L2} / (||u - v||_{C0} ||psi||_{L2}),
/// with P the pointwise geodesic transport. v == u reports 0.
double operator_lipschitz_check(const TargetManifold& N, const MapField& u, const MapField& v,
                                int trials, std::uint64_t seed);

/// max over nodes and random tangent Z at pi(u0(x)) of
///   |P^{v,u0} P^{u,v} P^{u0,u} Z - Z| / (||u - v||_{C0} |Z|).
double holonomy_check(const TargetManifold& N, const MapField& u0, const MapField& u,
                      const MapField& v, int trials, std::uint64_t seed);

}  // namespace dhflow::dirac
