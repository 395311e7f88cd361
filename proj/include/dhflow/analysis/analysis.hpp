#pragma once

#include <cstddef>
#include <vector>

#include "dhflow/geometry/fields.hpp"

namespace dhflow::analysis {

using geometry::MapField;
using geometry::TargetManifold;
using geometry::TorusDomain;
using geometry::TwistedSpinorField;

/// (1/2) |grad u|^2 per node (spectral gradient).
std::vector<double> energy_density(const MapField& u);

/// Sum of density * cell_area over nodes within torus distance `radius` of
/// `center`. Throws RadiusTooSmall when radius < 2 grid cells.
double local_energy(const MapField& u, std::size_t center, double radius);
double local_energy(const TorusDomain& d, const std::vector<double>& density, std::size_t center,
                    double radius);

struct ConcentrationReport {
  double threshold = 0.0;
  std::vector<double> radii;
  /// local[r][node]: minimum over the monitored states at radii[r].
  std::vector<std::vector<double>> local;
  /// Nodes whose local energy is >= threshold at every radius and state.
  std::vector<std::size_t> flagged;
};

/// Radius schedule {8h, 4h, 2h} with h the larger grid spacing.
std::vector<double> default_radii(const TorusDomain& d);

/// Discrete liminf test over a sequence of states (trajectory tail or the
/// converged maps of an alpha sequence).
ConcentrationReport concentration_monitor(const std::vector<MapField>& states,
                                          const std::vector<double>& radii, double threshold);
/// Same for precomputed energy densities on one domain.
ConcentrationReport concentration_monitor(const TorusDomain& d,
                                          const std::vector<std::vector<double>>& densities,
                                          const std::vector<double>& radii, double threshold);

struct SobolevNorms {
  double w1p = 0.0;     // (||psi||_p^p + ||grad psi||_p^p)^(1/p)
  double dirac_lp = 0.0;  // ||D psi||_p
  double lp = 0.0;      // ||psi||_p
};

/// Discrete W^{1,p} and L^p norms of a twisted spinor along u, p in (1, 2).
SobolevNorms sobolev_diagnostic(const TargetManifold& N, const MapField& u,
                                const TwistedSpinorField& psi, double p);

/// Homotopy invariants of a map on target:
///  - circle products: winding numbers (factor c along generator 1, then
///    generator 2, for each factor), from angle increments along the loops
///    through node (0, 0); throws AngleJumpTooLarge when an increment
///    reaches pi;
///  - S^2: the degree, from signed spherical-triangle areas / 4 pi; throws
///    DegreeNotNearInteger when the sum is more than 1e-6 from an integer;
///  - S^n for n >= 3: the empty tuple (every map from the torus is
///    null-homotopic).
std::vector<int> homotopy_invariants(const TargetManifold& N, const MapField& u);

}  // namespace dhflow::analysis
