#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "sgdsat/numerics.hpp"
#include "sgdsat/testproblems.hpp"

namespace sgdsat {

struct InverseInstance {
  Matrix A;
  Vector x1;
  Vector x_dag;
  double nu = 0.0;
  Vector y_dag;
  Vector y_delta;
  Vector xi;  // y_delta - y_dag, data units
  double delta = 0.0;
  double eps = 0.0;
  double w_norm = 0.0;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(A.cols()); }
  /// n^{-1/2} delta
  double delta_bar() const { return delta / std::sqrt(static_cast<double>(A.rows())); }
};

/// (A^t A)^nu x_e scaled to unit max-norm.
Vector make_true_solution(const Matrix& A, const Vector& x_e, double nu);

/// x1 + B^nu w with B = A^t A / n.
Vector synthesize_from_source(const Matrix& A, const Vector& x1, double nu, const Vector& w);

struct SourceElement {
  Vector w;
  double w_norm = 0.0;
  double residual = 0.0;  // ||B^nu w - (x_dag - x1)||
  bool satisfied = true;  // residual <= 1e-6 ||x_dag - x1||
};

/// Pseudo-inverse solve B^nu w = x_dag - x1 with eigenvalue cutoff
/// 1e-12 * max eigenvalue of B^nu.
SourceElement source_element(const Matrix& A, const Vector& x1, const Vector& x_dag, double nu);

struct NoisyData {
  Vector y_delta;
  Vector xi;  // data units
  double delta = 0.0;
};

/// y_delta_i = y_dag_i + eps ||y_dag||_inf g_i with g_i i.i.d. N(0, 1) drawn
/// from a 64-bit Mersenne twister seeded with `seed`.
NoisyData add_noise(const Vector& y_dag, double eps, std::uint64_t seed);

struct Preconditioned {
  Matrix A_tilde;  // Sigma V^t, rows pairwise orthogonal
  Vector y_tilde;  // U^t y
  Matrix U;        // full left factor, so further vectors can be mapped
};

Preconditioned precondition(const Matrix& A, const Vector& y);

/// Map a whole instance through the orthogonal transform: A -> U^t A and all
/// data vectors by U^t. The true solution and noise level are unchanged.
InverseInstance precondition_instance(const InverseInstance& inst);

/// Test problem -> experiment instance with x1 = 0.
InverseInstance make_instance(const TestProblem& problem, double nu, double eps, std::uint64_t noise_seed);

/// Arbitrary A, x1 = 0, x_dag = B^nu w, noise with the given relative level.
InverseInstance make_source_instance(const Matrix& A, double nu, const Vector& w, double eps,
                                     std::uint64_t noise_seed);

/// Instance manifest: all scalar and vector fields inline (17 significant
/// digits), the matrix written as CSV next to the manifest and referenced by
/// relative path.
void write_instance(const InverseInstance& inst, const std::string& json_path,
                    const std::string& matrix_csv_name = "A.csv");
InverseInstance read_instance(const std::string& json_path);

void write_matrix_csv(const Matrix& A, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

}  // namespace sgdsat
