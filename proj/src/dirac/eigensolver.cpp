#include "dhflow/dirac/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow::dirac {

using Eigen::MatrixXcd;

namespace {

std::vector<int> order_by_magnitude(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double fa = std::abs(v[a]), fb = std::abs(v[b]);
    if (fa != fb) return fa < fb;
    return v[a] < v[b];
  });
  return idx;
}

void apply_block(const HermitianOperator& op, const MatrixXcd& X, MatrixXcd& Y) {
  Y.resize(X.rows(), X.cols());
  for_each_index(static_cast<std::size_t>(X.cols()),
                 [&](std::size_t j) { op.apply(X.col(j).data(), Y.col(j).data()); });
}

void precondition_block(const HermitianOperator& op, const MatrixXcd& X, double sigma,
                        MatrixXcd& Y) {
  Y.resize(X.rows(), X.cols());
  for_each_index(static_cast<std::size_t>(X.cols()), [&](std::size_t j) {
    op.precondition(X.col(j).data(), Y.col(j).data(), sigma);
  });
}

// Orthonormal basis of span(W) minus span(Q) (Q orthonormal). Two passes of
// block then modified Gram-Schmidt; columns that collapse are dropped.
MatrixXcd orthonormal_complement(const MatrixXcd& Q, const MatrixXcd& W) {
  MatrixXcd out(W.rows(), W.cols());
  int kept = 0;
  for (int j = 0; j < W.cols(); ++j) {
    Eigen::VectorXcd v = W.col(j);
    const double n0 = v.norm();
    if (!(n0 > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (Q.cols() > 0) v -= Q * (Q.adjoint() * v);
      for (int i = 0; i < kept; ++i) v -= out.col(i) * out.col(i).dot(v);
    }
    const double n1 = v.norm();
    if (n1 <= 1e-10 * n0 || n1 < 1e-300) continue;
    out.col(kept++) = v / n1;
  }
  out.conservativeResize(Eigen::NoChange, kept);
  return out;
}

void lapack_check(lapack_int info, const char* what) {
  if (info != 0) {
    std::ostringstream os;
    os << what << " failed with info = " << info;
    throw EigensolveFailure(os.str());
  }
}

}  // namespace

std::vector<double> dense_eigenvalues(const HermitianOperator& op) {
  const lapack_int n = static_cast<lapack_int>(op.dim());
  std::vector<cd> A = assemble_dense(op);
  std::vector<double> w(n);
  lapack_int m = 0;
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_check(LAPACKE_zheevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', n, A.data(), n, 0.0, 0.0, 0, 0,
                              0.0, &m, w.data(), nullptr, 1, isuppz.data()),
               "zheevr");
  w.resize(m);
  return w;
}

EigenPairs dense_nearest_zero(const HermitianOperator& op, int k) {
  const lapack_int n = static_cast<lapack_int>(op.dim());
  if (k < 1 || k > n) throw std::invalid_argument("dense_nearest_zero: bad k");
  const std::vector<cd> A0 = assemble_dense(op);
  std::vector<cd> A = A0;
  std::vector<double> w(n);
  lapack_int m = 0;
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_check(LAPACKE_zheevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', n, A.data(), n, 0.0, 0.0, 0, 0,
                              0.0, &m, w.data(), nullptr, 1, isuppz.data()),
               "zheevr");
  // The k values of smallest magnitude form a contiguous index window.
  const auto first_nonneg = std::lower_bound(w.begin(), w.begin() + m, 0.0) - w.begin();
  lapack_int lo = static_cast<lapack_int>(first_nonneg), hi = lo;  // window [lo, hi)
  while (hi - lo < k) {
    if (lo == 0) {
      ++hi;
    } else if (hi == m) {
      --lo;
    } else if (std::abs(w[lo - 1]) <= std::abs(w[hi])) {
      --lo;
    } else {
      ++hi;
    }
  }
  A = A0;
  std::vector<double> wv(n);
  std::vector<cd> Z(static_cast<std::size_t>(n) * k);
  lapack_check(LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, A.data(), n, 0.0, 0.0, lo + 1,
                              hi, 0.0, &m, wv.data(), Z.data(), n, isuppz.data()),
               "zheevr");
  std::vector<double> vals(wv.begin(), wv.begin() + m);
  EigenPairs out;
  for (int j : order_by_magnitude(vals)) {
    out.values.push_back(vals[j]);
    std::vector<cd> v(Z.begin() + static_cast<std::size_t>(j) * n,
                      Z.begin() + static_cast<std::size_t>(j + 1) * n);
    std::vector<cd> Av(n);
    op.apply(v.data(), Av.data());
    double r = 0.0;
    for (lapack_int i = 0; i < n; ++i) r += std::norm(Av[i] - vals[j] * v[i]);
    out.residuals.push_back(std::sqrt(r));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

EigenPairs lobpcg_nearest_zero(const HermitianOperator& op, const LobpcgOptions& opt) {
  const int N = static_cast<int>(op.dim());
  const int k = opt.k;
  const int guard = opt.guard >= 0 ? opt.guard : std::max(4, k / 2);
  int m = k + guard;
  if (k < 1 || 3 * m > N) throw std::invalid_argument("lobpcg: block too large for operator");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd X0(N, m);
  int filled = 0;
  if (opt.warm) {
    for (const auto& v : *opt.warm) {
      if (filled == m) break;
      if (static_cast<int>(v.size()) != N) continue;
      X0.col(filled++) = Eigen::Map<const Eigen::VectorXcd>(v.data(), N);
    }
  }
  {
    MatrixXcd R(N, m - filled), TR;
    for (int j = 0; j < R.cols(); ++j)
      for (int i = 0; i < N; ++i) R(i, j) = cd(g(rng), g(rng));
    precondition_block(op, R, opt.sigma, TR);
    for (int j = 0; j < TR.cols(); ++j) X0.col(filled + j) = TR.col(j);
  }
  MatrixXcd X = orthonormal_complement(MatrixXcd(N, 0), X0);
  while (X.cols() < m) {
    MatrixXcd extra(N, m - X.cols());
    for (int j = 0; j < extra.cols(); ++j)
      for (int i = 0; i < N; ++i) extra(i, j) = cd(g(rng), g(rng));
    MatrixXcd add = orthonormal_complement(X, extra);
    MatrixXcd joined(N, X.cols() + add.cols());
    joined << X, add;
    X = joined;
  }

  MatrixXcd AX, A2X, P(N, 0), AS_new, TW;
  std::vector<double> worst_res;
  for (int it = 1; it <= opt.max_iter; ++it) {
    // Rayleigh-Ritz for A^2 on span X: right singular vectors of A X. The
    // columns of A X become orthogonal with norms sigma_j.
    apply_block(op, X, AX);
    Eigen::JacobiSVD<MatrixXcd> svd0(AX, Eigen::ComputeThinV);
    X = (X * svd0.matrixV()).eval();
    AX = (AX * svd0.matrixV()).eval();
    const Eigen::VectorXd sig = svd0.singularValues();
    apply_block(op, AX, A2X);

    // Signed extraction on span[X, A X] (A-invariant once X is A^2-invariant,
    // so +-lambda pairs split). A Y = A^2 X / sigma comes for free.
    // A^2 X / sigma carries roundoff ~ rho^2 eps / sigma, so Y is built only
    // where that stays well below tol. Clusters of smaller |lambda| lie wholly
    // inside the block and need no splitting.
    const double rho = op.spectral_radius();
    const double y_floor = std::max(1e-8 * sig(0), 1e-15 * rho * rho / opt.tol);
    std::vector<int> ycols;
    for (int j = 0; j < m; ++j)
      if (sig(j) > y_floor) ycols.push_back(j);
    const int ny = static_cast<int>(ycols.size());
    MatrixXcd B(N, m + ny), AB(N, m + ny);
    B.leftCols(m) = X;
    AB.leftCols(m) = AX;
    for (int c = 0; c < ny; ++c) {
      B.col(m + c) = AX.col(ycols[c]) / sig(ycols[c]);
      AB.col(m + c) = A2X.col(ycols[c]) / sig(ycols[c]);
    }
    // Canonical orthogonalization drops the directions where Y repeats X.
    MatrixXcd G = B.adjoint() * B;
    G = (0.5 * (G + G.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eg(G);
    std::vector<int> keep;
    for (int j = 0; j < G.rows(); ++j)
      if (eg.eigenvalues()(j) > 1e-10 * eg.eigenvalues()(G.rows() - 1)) keep.push_back(j);
    MatrixXcd T(G.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
      T.col(c) = eg.eigenvectors().col(keep[c]) / std::sqrt(eg.eigenvalues()(keep[c]));
    const MatrixXcd Q = B * T, AQ = AB * T;
    MatrixXcd H = Q.adjoint() * AQ;
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
    const std::vector<int> ord = order_by_magnitude(ev);
    const int kk = std::min<int>(k, static_cast<int>(ord.size()));
    EigenPairs out;
    out.iterations = it;
    bool converged = kk == k;
    worst_res.assign(1, 0.0);
    for (int j = 0; j < kk; ++j) {
      const Eigen::VectorXcd c = es.eigenvectors().col(ord[j]);
      Eigen::VectorXcd v = Q * c, Av = AQ * c;
      const double nv = v.norm();
      v /= nv;
      Av /= nv;
      const double r = (Av - ev[ord[j]] * v).norm();
      worst_res[0] = std::max(worst_res[0], r);
      if (!(r <= opt.tol)) {
        converged = false;
        break;
      }
      out.values.push_back(ev[ord[j]]);
      out.residuals.push_back(r);
      out.vectors.emplace_back(v.data(), v.data() + N);
    }
    if (converged) {
      // Residuals are re-measured with a fresh apply on the returned vectors.
      for (std::size_t j = 0; j < out.vectors.size(); ++j) {
        std::vector<cd> Av(N);
        op.apply(out.vectors[j].data(), Av.data());
        double r = 0.0;
        for (int i = 0; i < N; ++i) r += std::norm(Av[i] - out.values[j] * out.vectors[j][i]);
        out.residuals[j] = std::sqrt(r);
      }
      return out;
    }

    // Block growth: convergence of the wanted pairs is governed by the gap
    // between sigma_k and sigma_m. When a cluster straddles the block edge
    // that gap vanishes, so the block is widened with preconditioned random
    // vectors until the edge falls into a spectral gap.
    if (it % 10 == 0 && sig(m - 1) - sig(k - 1) < 0.05 * sig(m - 1) && 3 * (m + guard) <= N) {
      MatrixXcd extra(N, guard), Textra;
      for (int j = 0; j < guard; ++j)
        for (int i = 0; i < N; ++i) extra(i, j) = cd(g(rng), g(rng));
      precondition_block(op, extra, opt.sigma, Textra);
      MatrixXcd add = orthonormal_complement(X, Textra);
      MatrixXcd joined(N, X.cols() + add.cols());
      joined << X, add;
      X = joined;
      m = static_cast<int>(X.cols());
      P.resize(N, 0);
      continue;
    }

    // Preconditioned A^2 residuals of the unconverged Ritz vectors.
    MatrixXcd R2(N, m);
    int na = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd r = A2X.col(j) - sig(j) * sig(j) * X.col(j);
      if (r.norm() > 0.1 * opt.tol * std::max(sig(j), opt.tol)) R2.col(na++) = r;
    }
    R2.conservativeResize(Eigen::NoChange, na);
    precondition_block(op, R2, opt.sigma, TW);

    MatrixXcd WP(N, TW.cols() + P.cols());
    WP << TW, P;
    MatrixXcd S_new = orthonormal_complement(X, WP);
    apply_block(op, S_new, AS_new);

    MatrixXcd S(N, m + S_new.cols()), AS(N, m + S_new.cols());
    S << X, S_new;
    AS << AX, AS_new;
    // Smallest singular values of A S <-> smallest eigenvalues of A^2 on span S.
    Eigen::JacobiSVD<MatrixXcd> svd(AS, Eigen::ComputeThinV);
    const int cols = static_cast<int>(S.cols());
    MatrixXcd Vm = svd.matrixV().rightCols(m);
    P = S_new * Vm.bottomRows(cols - m);
    // Fresh orthonormalization keeps roundoff from accumulating in X.
    MatrixXcd Xo = orthonormal_complement(MatrixXcd(N, 0), S * Vm);
    if (Xo.cols() < m) throw EigensolveFailure("eigensolver block lost rank");
    X = Xo;
  }
  std::ostringstream os;
  os << "eigensolver did not converge in " << opt.max_iter << " iterations; worst residual "
     << (worst_res.empty() ? 0.0 : worst_res[0]) << " > " << opt.tol;
  throw EigensolveFailure(os.str());
}

}  // namespace dhflow::dirac
