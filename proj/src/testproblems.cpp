#include "sgdsat/testproblems.hpp"

#include <cmath>
#include <numbers>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

constexpr double kPi = std::numbers::pi;

TestProblem make_shaw(int n) {
  TestProblem p{ProblemKind::shaw, n, n, Matrix(n, n), Vector(n), Vector(n)};
  const double h = kPi / n;
  for (int i = 0; i < n; ++i) p.grid(i) = -kPi / 2 + (i + 0.5) * h;
  for (int i = 0; i < n; ++i) {
    const double cs = std::cos(p.grid(i));
    const double ss = std::sin(p.grid(i));
    for (int j = 0; j <= i; ++j) {
      const double c = cs + std::cos(p.grid(j));
      const double u = kPi * (ss + std::sin(p.grid(j)));
      const double sinc = u == 0.0 ? 1.0 : std::sin(u) / u;
      const double v = h * c * c * sinc * sinc;
      p.A(i, j) = v;
      p.A(j, i) = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double t = p.grid(i);
    p.x_e(i) = 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) + std::exp(-2.0 * (t + 0.5) * (t + 0.5));
  }
  return p;
}

TestProblem make_gravity(int n) {
  TestProblem p{ProblemKind::gravity, n, n, Matrix(n, n), Vector(n), Vector(n)};
  const double h = 1.0 / n;
  const double d = 0.25;
  for (int i = 0; i < n; ++i) p.grid(i) = (i + 0.5) * h;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double diff = p.grid(i) - p.grid(j);
      const double v = h * d * std::pow(d * d + diff * diff, -1.5);
      p.A(i, j) = v;
      p.A(j, i) = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double t = p.grid(i);
    p.x_e(i) = std::sin(kPi * t) + 0.5 * std::sin(2.0 * kPi * t);
  }
  return p;
}

// The Galerkin integral (1/h) int_{e_i} int_{e_j} theta(s - t) depends only
// on |i - j|, and integrating twice gives a closed form in cosines of
// multiples of 4 pi / n (the element width in units of the period 6).
TestProblem make_phillips(int n) {
  if (n % 4 != 0) fail("invalid_argument", "phillips requires n divisible by 4");
  TestProblem p{ProblemKind::phillips, n, n, Matrix::Zero(n, n), Vector(n), Vector(n)};
  const double h = 12.0 / n;
  const int n4 = n / 4;
  const double omega = 4.0 * kPi / n;
  const double scale = 9.0 / (h * kPi * kPi);
  auto c = [omega](int i) { return std::cos(i * omega); };

  Vector r1 = Vector::Zero(n);
  for (int d = 0; d < n4; ++d) r1(d) = h + scale * (2.0 * c(d) - c(d - 1) - c(d + 1));
  r1(n4) = h / 2.0 + scale * (std::cos(omega) - 1.0);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p.A(i, j) = r1(std::abs(i - j));
  }
  for (int i = 0; i < n; ++i) {
    p.grid(i) = -6.0 + (i + 0.5) * h;
    p.x_e(i) = phillips_theta(p.grid(i));
  }
  return p;
}

}  // namespace

double phillips_theta(double x) {
  return std::abs(x) < 3.0 ? 1.0 + std::cos(kPi * x / 3.0) : 0.0;
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "shaw" || name == "s-shaw") return ProblemKind::shaw;
  if (name == "gravity" || name == "s-gravity") return ProblemKind::gravity;
  if (name == "phillips" || name == "s-phillips") return ProblemKind::phillips;
  fail("invalid_argument", "unknown problem '" + name + "' (expected shaw, gravity or phillips)");
}

std::string problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::shaw: return "shaw";
    case ProblemKind::gravity: return "gravity";
    case ProblemKind::phillips: return "phillips";
  }
  return "unknown";
}

TestProblem make_problem(ProblemKind kind, int n) {
  require(n >= 4, "make_problem: n must be at least 4");
  switch (kind) {
    case ProblemKind::shaw: return make_shaw(n);
    case ProblemKind::gravity: return make_gravity(n);
    case ProblemKind::phillips: return make_phillips(n);
  }
  fail("invalid_argument", "make_problem: unknown problem kind");
}

TestProblem make_problem(const std::string& name, int n) { return make_problem(parse_problem(name), n); }

double reference_stepsize(const Matrix& A) {
  const double r = row_norms_squared(A).maxCoeff();
  require(r > 0.0, "reference_stepsize: matrix has no nonzero row");
  return 1.0 / r;
}

StepsizeReport admissible_c0(const Matrix& A, double alpha) {
  require(A.rows() > 0 && A.cols() > 0, "admissible_c0: empty matrix");
  require(alpha >= 0.0 && alpha < 1.0, "admissible_c0: alpha must lie in [0, 1)");
  StepsizeReport r;
  r.alpha = alpha;
  r.max_row_norm_sq = row_norms_squared(A).maxCoeff();
  if (!(r.max_row_norm_sq > 0.0)) fail("invalid_argument", "admissible_c0: zero matrix");
  r.row_bound = 1.0 / r.max_row_norm_sq;
  const double s = spectral_norm(A);
  r.b_norm = s * s / static_cast<double>(A.rows());
  r.spectral_bound = 1.0 / (2.0 * std::numbers::e * r.b_norm);
  r.c0_max = std::min({r.row_bound, r.unit_bound, r.spectral_bound});
  if (!(r.c0_max * r.max_row_norm_sq <= 1.0 + 1e-15 && r.c0_max <= 1.0 &&
        r.c0_max * r.b_norm <= 1.0 / (2.0 * std::numbers::e) * (1.0 + 1e-15))) {
    fail("invalid_argument", "admissible_c0: internal constraint check failed");
  }
  return r;
}

}  // namespace sgdsat
