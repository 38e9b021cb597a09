#pragma once

// Dense kernels shared by every module: SVD, symmetric spectral calculus,
// spectral norms. All storage is double precision.

#include <Eigen/Dense>

#include <functional>

namespace sgdsat {

/// Row-major so that the rows a_i used by the stochastic solvers are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Svd {
  Matrix U;      // n x r (thin) or n x n (full)
  Vector sigma;  // nonincreasing, nonnegative, length min(n, m)
  Matrix V;      // m x min(n, m) (thin) or m x m (full)
};

enum class SvdMode { thin, full };

/// Singular value decomposition A = U diag(sigma) V^t.
///
/// The result is checked against the reconstruction tolerance
/// 1e-10 * (1 + ||A||); if the underlying routine reports non-convergence or
/// the residual check fails an Error("svd_no_convergence") is thrown.
Svd svd(const Matrix& A, SvdMode mode = SvdMode::thin);

/// Eigendecomposition S = Q diag(lambda) Q^t of a symmetric PSD matrix, with
/// eigenvalues in [-1e-10 ||S||, 0) clamped to zero. Eigenvalues ascending.
struct SymEigen {
  Vector lambda;
  Matrix Q;

  /// Q diag(f(lambda)) Q^t.
  Matrix apply(const std::function<double(double)>& f) const;
  double norm() const { return lambda.size() ? lambda.maxCoeff() : 0.0; }
};

/// Rejects asymmetric input (relative 1e-12) and negative eigenvalues beyond
/// the clamping slack.
SymEigen sym_eigen(const Matrix& S);

/// S^p for symmetric PSD S and p >= 0 (S^0 = I).
Matrix sym_power(const Matrix& S, double p);

/// Largest singular value.
double spectral_norm(const Matrix& A);

double max_abs(const Matrix& A);

/// B = n^{-1} A^t A.
Matrix normal_operator(const Matrix& A);

/// Squared Euclidean norms of the rows.
Vector row_norms_squared(const Matrix& A);

/// True when the rows are pairwise orthogonal, i.e. A = Sigma V^t form:
/// ||A A^t - diag(A A^t)||_max <= tol * ||A||^2.
bool rows_orthogonal(const Matrix& A, double tol = 1e-10);

}  // namespace sgdsat
