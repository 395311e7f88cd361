#pragma once

#include <vector>

#include "dhflow/dirac/operator.hpp"
#include "dhflow/flow/terms.hpp"

namespace dhflow::flow {

/// (1/2) |grad u|^2 per node.
std::vector<double> energy_density(const MapField& u);

/// E^alpha(u) = (1/2) sum (1 + |grad u|^2)^alpha cell_area; at least Area/2.
double energy_alpha(const MapField& u, double alpha);
/// E(u) = (1/2) sum |grad u|^2 cell_area.
double dirichlet_energy(const MapField& u);
/// L^alpha(u, psi) = E^alpha(u) + (1/2) Re<psi, D psi>.
double action(const TargetManifold& N, const MapField& u, const TwistedSpinorField& psi,
              double alpha);

struct ElResidual {
  /// || P (w * map_rhs) ||_{L2}, w = (1 + |grad u|^2)^(alpha-1): the
  /// tangential alpha-tension minus the spinor curvature term.
  double map = 0.0;
  /// || D psi ||_{L2}; zero for a spinor-free state.
  double spinor = 0.0;
};

/// `psi` may be null.
ElResidual el_residual(const TargetManifold& N, const MapField& u, const TwistedSpinorField* psi,
                       double alpha);

}  // namespace dhflow::flow
