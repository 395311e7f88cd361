#pragma once

#include <vector>

#include "dhflow/geometry/fields.hpp"
#include "dhflow/geometry/spectral.hpp"

namespace dhflow::flow {

using geometry::MapField;
using geometry::TargetManifold;
using geometry::TwistedSpinorField;

/// Spectral first and second derivatives of a map, node-major with q
/// components (same layout as MapField::values).
struct MapJet {
  std::vector<double> d0, d1;          // d_1 u, d_2 u
  std::vector<double> d00, d01, d11;   // second derivatives
  std::vector<double> lap;             // spectral Laplacian
  std::vector<double> grad_sq;         // |grad u|^2 per node

  MapJet(const geometry::Spectral& sp, const MapField& u);
};

/// F1^A = -pi^A_BC(u) <grad u^B, grad u^C>. Normal to N when u lies on N.
std::vector<double> f1_term(const TargetManifold& N, const MapField& u);
std::vector<double> f1_term(const TargetManifold& N, const MapField& u, const MapJet& jet);

/// F2^A = -pi^A_B pi^C_BD pi^C_EF Re<psi^D, grad u^E . psi^F>, where
/// grad u^E . psi = sum_beta d_beta u^E e_beta psi. Quadratic in psi.
std::vector<double> f2_term(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField& psi);
std::vector<double> f2_term(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField& psi, const MapJet& jet);

/// sum_{beta,gamma} d2_{beta gamma} u^B d_beta u^B d_gamma u^A.
std::vector<double> hessian_coupling(const MapJet& jet, int q);

/// (1 + |grad u|^2)^(alpha - 1) per node.
std::vector<double> alpha_weight(const MapJet& jet, double alpha);

struct RhsParts {
  std::vector<double> laplacian;
  std::vector<double> coupling;  // 2 (alpha-1) H / (1 + |grad u|^2)
  std::vector<double> f1;
  std::vector<double> f2;        // F2 / (alpha w)
  std::vector<double> total;
};

/// Right-hand side of the map equation
///   Delta u + 2(alpha-1) H/(1+|grad u|^2) + F1 + F2/(alpha (1+|grad u|^2)^(alpha-1)).
/// `psi` may be null (spinor-free flow). Throws TubeViolation.
RhsParts map_rhs_parts(const TargetManifold& N, const MapField& u,
                       const TwistedSpinorField* psi, double alpha);
std::vector<double> map_rhs(const TargetManifold& N, const MapField& u,
                            const TwistedSpinorField* psi, double alpha);

}  // namespace dhflow::flow
