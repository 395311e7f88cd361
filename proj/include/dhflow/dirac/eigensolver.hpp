#pragma once

#include <cstdint>
#include <vector>

#include "dhflow/dirac/operator.hpp"

namespace dhflow::dirac {

/// Eigenpairs sorted by |lambda| (ties by lambda). Vectors have unit
/// Euclidean norm.
struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<cd>> vectors;
  std::vector<double> residuals;  // |A v - lambda v|
  int iterations = 0;
};

/// All eigenvalues of the dense assembly, ascending.
std::vector<double> dense_eigenvalues(const HermitianOperator& op);

/// The k eigenpairs nearest zero from a dense LAPACK solve.
EigenPairs dense_nearest_zero(const HermitianOperator& op, int k);

struct LobpcgOptions {
  int k = 8;
  /// Extra block vectors beyond k; negative selects max(4, k/2).
  int guard = -1;
  /// Absolute tolerance on |A v - lambda v| for the k wanted pairs.
  double tol = 1e-10;
  int max_iter = 500;
  /// Preconditioner shift sigma in (A^2 + sigma)^{-1}.
  double sigma = 1.0;
  std::uint64_t seed = 0;
  /// Optional starting vectors (need not be orthonormal).
  const std::vector<std::vector<cd>>* warm = nullptr;
};

/// Block preconditioned eigensolver for the k eigenpairs nearest zero.
///
/// Runs LOBPCG on A^2 with Rayleigh-Ritz done through the SVD of A S (the
/// singular values of A S resolve small |lambda| to working precision,
/// unlike the Gram matrix S* A^2 S). Each iteration also runs a signed
/// Rayleigh-Ritz with A on span[X, A X] to split +-lambda pairs. Throws
/// EigensolveFailure without convergence.
EigenPairs lobpcg_nearest_zero(const HermitianOperator& op, const LobpcgOptions& opt);

}  // namespace dhflow::dirac
