#pragma once

#include <cmath>
#include <random>

#include "sgdsat/instances.hpp"
#include "sgdsat/numerics.hpp"

namespace testsupport {

inline sgdsat::Matrix gaussian(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  sgdsat::Matrix A(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(rng);
  return A;
}

inline sgdsat::Vector gaussian_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  sgdsat::Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

// Scaled so that ||A||^2 / n = b_norm.
inline sgdsat::Matrix scaled_gaussian(int n, int m, double b_norm, std::mt19937_64& rng) {
  sgdsat::Matrix A = gaussian(n, m, rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> dec{Eigen::MatrixXd(A)};
  A *= std::sqrt(b_norm * n) / dec.singularValues()(0);
  return A;
}

// Explicit instance with y_delta = A x_dag + xi and nonzero x1.
inline sgdsat::InverseInstance raw_instance(const sgdsat::Matrix& A, std::mt19937_64& rng, double noise) {
  sgdsat::InverseInstance inst;
  inst.A = A;
  inst.x1 = 0.3 * gaussian_vec(static_cast<int>(A.cols()), rng);
  inst.x_dag = gaussian_vec(static_cast<int>(A.cols()), rng);
  inst.y_dag = A * inst.x_dag;
  inst.xi = noise * gaussian_vec(static_cast<int>(A.rows()), rng);
  inst.y_delta = inst.y_dag + inst.xi;
  inst.delta = inst.xi.norm();
  return inst;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testsupport
