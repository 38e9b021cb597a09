#include "sgdsat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

bool all_finite(const Matrix& A) { return A.allFinite(); }

}  // namespace

Svd svd(const Matrix& A, SvdMode mode) {
  require(A.rows() > 0 && A.cols() > 0, "svd: empty matrix");
  require(all_finite(A), "svd: non-finite entries");

  const Eigen::MatrixXd dense = A;
  const unsigned options = mode == SvdMode::full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                                 : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  // BDCSVD delegates to one-sided Jacobi below its block size.
  Eigen::BDCSVD<Eigen::MatrixXd> dec(dense, options);
  if (dec.info() != Eigen::Success) {
    fail("svd_no_convergence", "svd: divide-and-conquer SVD did not converge");
  }

  Svd out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  const Eigen::Index r = out.sigma.size();
  const double norm = r ? out.sigma(0) : 0.0;
  const Eigen::MatrixXd recon =
      out.U.leftCols(r) * out.sigma.asDiagonal() * out.V.leftCols(r).transpose();
  // The 2-norm of the residual is bounded by its Frobenius norm.
  const double residual = (dense - recon).norm();
  if (!std::isfinite(residual) || residual > 1e-10 * (1.0 + norm)) {
    fail("svd_no_convergence",
         "svd: reconstruction residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return out;
}

Matrix SymEigen::apply(const std::function<double(double)>& f) const {
  Vector d(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) d(i) = f(lambda(i));
  Matrix out = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (out + out.transpose());
}

SymEigen sym_eigen(const Matrix& S) {
  require(S.rows() == S.cols() && S.rows() > 0, "sym_eigen: matrix must be square and nonempty");
  require(S.allFinite(), "sym_eigen: non-finite entries");
  const double scale = max_abs(S);
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    fail("invalid_argument", "sym_eigen: matrix is not symmetric (asymmetry " +
                                 std::to_string(asym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(S), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    fail("svd_no_convergence", "sym_eigen: eigensolver did not converge");
  }
  SymEigen out{es.eigenvalues(), es.eigenvectors()};
  const double norm = std::max(std::abs(out.lambda.minCoeff()), std::abs(out.lambda.maxCoeff()));
  for (Eigen::Index i = 0; i < out.lambda.size(); ++i) {
    double& l = out.lambda(i);
    if (l < 0.0) {
      if (l < -1e-10 * norm) {
        fail("invalid_argument",
             "sym_eigen: negative eigenvalue " + std::to_string(l) + " beyond PSD tolerance");
      }
      l = 0.0;
    }
  }
  return out;
}

Matrix sym_power(const Matrix& S, double p) {
  require(p >= 0.0 && std::isfinite(p), "sym_power: exponent must be finite and >= 0");
  const SymEigen es = sym_eigen(S);
  if (p == 0.0) return Matrix::Identity(S.rows(), S.cols());
  return es.apply([p](double l) { return l > 0.0 ? std::pow(l, p) : 0.0; });
}

double spectral_norm(const Matrix& A) {
  require(A.allFinite(), "spectral_norm: non-finite entries");
  if (A.size() == 0) return 0.0;
  const Eigen::MatrixXd dense = A;
  Eigen::BDCSVD<Eigen::MatrixXd> dec(dense);
  if (dec.info() != Eigen::Success) {
    fail("svd_no_convergence", "spectral_norm: SVD did not converge");
  }
  return dec.singularValues()(0);
}

double max_abs(const Matrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

Matrix normal_operator(const Matrix& A) {
  Matrix B = (A.transpose() * A) / static_cast<double>(A.rows());
  return 0.5 * (B + B.transpose());
}

Vector row_norms_squared(const Matrix& A) { return A.rowwise().squaredNorm(); }

bool rows_orthogonal(const Matrix& A, double tol) {
  Matrix G = A * A.transpose();
  const double scale = spectral_norm(A);
  G.diagonal().setZero();
  return max_abs(G) <= tol * scale * scale;
}

}  // namespace sgdsat
