#pragma once

#include <random>
#include <vector>

#include "dhflow/geometry/fields.hpp"

namespace dhflow::geometry {

using Rng = std::mt19937_64;

/// Random trigonometric polynomial with ncomp components and modes
/// min_mode <= max(|k1|,|k2|) <= max_mode, Gaussian coefficients damped by
/// 1/(1+|k|^2), scaled so the largest nodal Euclidean norm is 1.
std::vector<double> smooth_random_field(const TorusDomain& d, int ncomp, int max_mode, Rng& rng,
                                        int min_mode = 0);

/// Complex analogue for spinor-type data, with unit weighted L2 norm. The
/// field carries the domain's spin structure (antiperiodic directions use
/// half-integer modes).
std::vector<cd> smooth_random_spinor(const TorusDomain& d, int ncomp, int max_mode, Rng& rng);

/// u(x) = p for every node.
MapField constant_map(const TorusDomain& d, const TargetManifold& N, const Vec& p);
/// Base point (r, 0, ..., 0) per sphere or circle factor.
Vec base_point(const TargetManifold& N);
/// Linear winding theta = 2 pi (k1 x / L1 + k2 y / L2) into the first circle
/// factor (circle torus) or the great circle in the (e0, e1) plane (sphere).
MapField winding_map(const TorusDomain& d, const TargetManifold& N, int k1, int k2);
/// pi(u + amplitude * eta) with eta = smooth_random_field(...).
MapField perturbed_map(const MapField& u, const TargetManifold& N, double amplitude, Rng& rng,
                       int max_mode = 2, int min_mode = 0);

/// Random smooth twisted spinor, tangent along pi(u), unit weighted L2 norm.
TwistedSpinorField random_tangent_spinor(const MapField& u, const TargetManifold& N, Rng& rng,
                                         int max_mode = 2);

}  // namespace dhflow::geometry
