#include <doctest.h>

#include <random>

#include "sgdsat/error.hpp"
#include "sgdsat/numerics.hpp"
#include "support.hpp"

using namespace sgdsat;
using testsupport::gaussian;

namespace {

// Power iteration on A^t A as an independent route to ||A||.
double power_norm(const Matrix& A) {
  Vector v = Vector::Ones(A.cols());
  double s = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Vector w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (std::abs(nw - s) <= 1e-15 * nw) break;
    s = nw;
  }
  return std::sqrt((A * v).squaredNorm());
}

}  // namespace

TEST_CASE("svd reconstructs and orders singular values") {
  std::mt19937_64 rng(7);
  for (auto [n, m] : {std::pair{5, 5}, {7, 3}, {3, 7}, {1, 4}}) {
    const Matrix A = gaussian(n, m, rng);
    const Svd s = svd(A);
    const int r = std::min(n, m);
    CHECK(s.sigma.size() == r);
    CHECK((s.U * s.sigma.asDiagonal() * s.V.transpose() - A).norm() <= 1e-12 * A.norm());
    CHECK((s.U.transpose() * s.U - Matrix::Identity(r, r)).norm() < 1e-12);
    CHECK((s.V.transpose() * s.V - Matrix::Identity(r, r)).norm() < 1e-12);
    for (int i = 1; i < r; ++i) CHECK(s.sigma(i) <= s.sigma(i - 1));

    // sigma^2 are the top eigenvalues of A^t A.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A.transpose() * A)};
    for (int i = 0; i < r; ++i) {
      CHECK(s.sigma(i) * s.sigma(i) == doctest::Approx(es.eigenvalues()(m - 1 - i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("full svd has square orthogonal factors") {
  std::mt19937_64 rng(8);
  const Matrix A = gaussian(6, 4, rng);
  const Svd s = svd(A, SvdMode::full);
  CHECK(s.U.rows() == 6);
  CHECK(s.U.cols() == 6);
  CHECK(s.V.cols() == 4);
  CHECK((s.U.transpose() * s.U - Matrix::Identity(6, 6)).norm() < 1e-12);
  Matrix S = Matrix::Zero(6, 4);
  for (int i = 0; i < 4; ++i) S(i, i) = s.sigma(i);
  CHECK((s.U * S * s.V.transpose() - A).norm() < 1e-12 * A.norm());
}

TEST_CASE("svd of the zero matrix") {
  const Svd s = svd(Matrix::Zero(3, 2));
  CHECK(s.sigma.norm() == 0.0);
}

TEST_CASE("spectral norm agrees with power iteration") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const Matrix A = gaussian(4 + t, 3 + (t % 4), rng);
    CHECK(spectral_norm(A) == doctest::Approx(power_norm(A)).epsilon(1e-8));
  }
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 0.5, -2.0, 1.0;
  CHECK(spectral_norm(D) == doctest::Approx(2.0));
}

TEST_CASE("symmetric powers") {
  std::mt19937_64 rng(10);
  const Matrix G = gaussian(5, 5, rng);
  const Matrix S = G.transpose() * G;
  const Matrix half = sym_power(S, 0.5);
  CHECK((half * half - S).norm() < 1e-10 * S.norm());
  CHECK((sym_power(S, 1.0) - S).norm() < 1e-10 * S.norm());
  CHECK((sym_power(S, 2.0) - S * S).norm() < 1e-10 * (S * S).norm());
  CHECK((sym_power(S, 0.0) - Matrix::Identity(5, 5)).norm() < 1e-12);

  // Singular PSD input: rounding-level eigenvalues only leave sqrt(eps) residue.
  Vector v = Vector::Ones(4);
  const Matrix P = v * v.transpose();
  CHECK((sym_power(P, 0.5) - P / 2.0).norm() < 1e-7);
  CHECK((sym_power(P, 1.5) - P * 2.0).norm() < 1e-12);
}

TEST_CASE("sym_eigen rejects indefinite and asymmetric input") {
  Matrix S(2, 2);
  S << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(sym_eigen(S), Error);
  Matrix T(2, 2);
  T << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(sym_eigen(T), Error);
}

TEST_CASE("normal operator and row norms") {
  std::mt19937_64 rng(11);
  const Matrix A = gaussian(4, 3, rng);
  const Matrix B = normal_operator(A);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += A(i, a) * A(i, b);
      CHECK(B(a, b) == doctest::Approx(s / 4.0));
    }
  const Vector r = row_norms_squared(A);
  for (int i = 0; i < 4; ++i) CHECK(r(i) == doctest::Approx(A.row(i).squaredNorm()));
}

TEST_CASE("row orthogonality detection") {
  std::mt19937_64 rng(12);
  const Matrix G = gaussian(5, 5, rng);
  CHECK_FALSE(rows_orthogonal(G));
  const Svd s = svd(G);
  const Matrix SV = s.sigma.asDiagonal() * s.V.transpose();
  CHECK(rows_orthogonal(SV));
  CHECK(rows_orthogonal(s.U.transpose() * G, 1e-10));
}
