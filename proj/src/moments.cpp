#include "sgdsat/moments.hpp"

#include <algorithm>
#include <string>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

void symmetrize(Matrix& M) { M = 0.5 * (M + M.transpose()).eval(); }

// M' = M - eta (BM + MB) + eta (mu g^t + g mu^t) + (eta^2 / n) A^t diag(d) A
// with g = n^{-1} A^t xi and d_i = a_i^t M a_i - 2 xi_i a_i^t mu + xi_i^2.
void step_impl(MomentState& s, const Matrix& A, const Vector& xi, const Matrix& B, const Vector& g,
               double eta) {
  if (eta == 0.0) {
    ++s.k;
    return;
  }
  const double n = static_cast<double>(A.rows());
  const Matrix AM = A * s.M;
  const Vector Amu = A * s.mu;
  Vector d(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    d(i) = AM.row(i).dot(A.row(i)) - 2.0 * xi(i) * Amu(i) + xi(i) * xi(i);
  }
  const Matrix BM = B * s.M;
  Matrix next = s.M;
  next -= eta * (BM + BM.transpose());
  next += eta * (s.mu * g.transpose() + g * s.mu.transpose());
  next += (eta * eta / n) * (A.transpose() * d.asDiagonal() * A);
  symmetrize(next);

  s.mu = s.mu - eta * (B * s.mu) + eta * g;
  s.M = std::move(next);
  ++s.k;
}

}  // namespace

MomentState init_moments(const Vector& x1, const Vector& x_dag) {
  require(x1.size() == x_dag.size(), "init_moments: length mismatch");
  MomentState s;
  s.k = 1;
  s.mu = x1 - x_dag;
  s.M = s.mu * s.mu.transpose();
  return s;
}

MomentState step_moments(const MomentState& s, const Matrix& A, const Vector& xi, double eta) {
  require(A.cols() == s.mu.size() && xi.size() == A.rows(), "step_moments: dimension mismatch");
  const Matrix B = normal_operator(A);
  const Vector g = A.transpose() * xi / static_cast<double>(A.rows());
  MomentState out = s;
  step_impl(out, A, xi, B, g, eta);
  return out;
}

double mse(const MomentState& s) { return s.M.trace(); }
double bias_sq(const MomentState& s) { return s.mu.squaredNorm(); }
double variance(const MomentState& s) { return s.M.trace() - s.mu.squaredNorm(); }

MomentOracle::MomentOracle(const Matrix& A, const Vector& xi, const MomentBudget& budget)
    : A_(A), xi_(xi), budget_(budget) {
  require(xi.size() == A.rows(), "MomentOracle: xi length must equal row count");
  if (A.rows() > budget.max_n || A.cols() > budget.max_m) {
    fail("budget_exceeded", "MomentOracle: " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                                " exceeds the moment budget " + std::to_string(budget.max_n) + "x" +
                                std::to_string(budget.max_m));
  }
  B_ = normal_operator(A_);
  Atxi_n_ = A_.transpose() * xi_ / static_cast<double>(A_.rows());
}

MomentOracle::MomentOracle(const InverseInstance& inst, const MomentBudget& budget)
    : MomentOracle(inst.A, inst.y_delta - inst.A * inst.x_dag, budget) {}

void MomentOracle::step(MomentState& s, double eta) const { step_impl(s, A_, xi_, B_, Atxi_n_, eta); }

std::vector<MomentState> MomentOracle::run(const MomentState& start, const StepSchedule& sched,
                                           long long k_max) const {
  if (k_max > budget_.max_k) {
    fail("budget_exceeded", "MomentOracle: k = " + std::to_string(k_max) + " exceeds budget " +
                                std::to_string(budget_.max_k));
  }
  std::vector<MomentState> out;
  out.reserve(static_cast<std::size_t>(std::max(0LL, k_max - start.k + 1)));
  MomentState s = start;
  out.push_back(s);
  while (s.k < k_max) {
    step(s, sched.eta(s.k));
    out.push_back(s);
  }
  return out;
}

std::vector<double> MomentOracle::mse_at(const MomentState& start, const StepSchedule& sched,
                                         const std::vector<long long>& iters) const {
  require(std::is_sorted(iters.begin(), iters.end()), "mse_at: iterations must be sorted");
  if (!iters.empty() && iters.back() + 1 > budget_.max_k) {
    fail("budget_exceeded", "MomentOracle: k = " + std::to_string(iters.back() + 1) + " exceeds budget " +
                                std::to_string(budget_.max_k));
  }
  std::vector<double> out;
  out.reserve(iters.size());
  MomentState s = start;
  for (long long target : iters) {
    while (s.k < target + 1) step(s, sched.eta(s.k));
    out.push_back(mse(s));
  }
  return out;
}

}  // namespace sgdsat
