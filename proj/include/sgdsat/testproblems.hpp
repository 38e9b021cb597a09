#pragma once

#include <string>

#include "sgdsat/numerics.hpp"

namespace sgdsat {

enum class ProblemKind { shaw, gravity, phillips };

ProblemKind parse_problem(const std::string& name);
std::string problem_name(ProblemKind kind);

struct TestProblem {
  ProblemKind kind;
  int n = 0;
  int m = 0;
  Matrix A;
  Vector x_e;   // canonical exact solution sampled on the grid
  Vector grid;  // quadrature nodes / element midpoints
};

/// Deterministic discretizations on n nodes (n >= 4; phillips needs n % 4 == 0).
///
/// shaw:     midpoint rule on [-pi/2, pi/2].
/// gravity:  midpoint rule on [0, 1], depth d = 0.25.
/// phillips: piecewise-constant Galerkin on [-6, 6], element integrals
///           scaled by 1/h so that entries approximate h * theta(s - t).
TestProblem make_problem(ProblemKind kind, int n);
TestProblem make_problem(const std::string& name, int n);

/// The Phillips kernel theta(x) = 1 + cos(pi x / 3) on |x| < 3, else 0.
double phillips_theta(double x);

struct StepsizeReport {
  double max_row_norm_sq = 0.0;
  double row_bound = 0.0;       // 1 / max_i ||a_i||^2
  double unit_bound = 1.0;      // c0 <= 1
  double b_norm = 0.0;          // ||B||, B = A^t A / n
  double spectral_bound = 0.0;  // 1 / (2 e ||B||)
  double c0_max = 0.0;
  double alpha = 0.0;
};

/// Largest c0 meeting c0 <= min(1/max||a_i||^2, 1) and c0 ||B|| <= 1/(2e).
StepsizeReport admissible_c0(const Matrix& A, double alpha = 0.0);

/// c = 1 / max_i ||a_i||^2, the reference constant for stepsize expressions.
double reference_stepsize(const Matrix& A);

}  // namespace sgdsat
