#pragma once

#include <vector>

#include "sgdsat/instances.hpp"
#include "sgdsat/numerics.hpp"
#include "sgdsat/solvers.hpp"

namespace sgdsat {

/// First and second moments of the SGD error e_k = x_k - x_dag.
struct MomentState {
  long long k = 1;
  Vector mu;  // E[e_k]
  Matrix M;   // E[e_k e_k^t]
};

struct MomentBudget {
  int max_n = 64;
  int max_m = 64;
  long long max_k = 10'000;
};

MomentState init_moments(const Vector& x1, const Vector& x_dag);

/// One exact step of the moment recursion for a uniform row index, with xi
/// the data perturbation y_delta - A x_dag.
MomentState step_moments(const MomentState& s, const Matrix& A, const Vector& xi, double eta);

double mse(const MomentState& s);
double bias_sq(const MomentState& s);
double variance(const MomentState& s);

/// Precomputes B and A^t xi for repeated stepping on one instance.
class MomentOracle {
 public:
  MomentOracle(const Matrix& A, const Vector& xi, const MomentBudget& budget = {});
  MomentOracle(const InverseInstance& inst, const MomentBudget& budget = {});

  MomentState init(const Vector& x1, const Vector& x_dag) const { return init_moments(x1, x_dag); }
  void step(MomentState& s, double eta) const;

  /// States k = 1 .. k_max (index j holds k = j + 1).
  std::vector<MomentState> run(const MomentState& start, const StepSchedule& sched, long long k_max) const;

  /// trace(M_k) at the requested iteration counts (number of updates).
  std::vector<double> mse_at(const MomentState& start, const StepSchedule& sched,
                             const std::vector<long long>& iters) const;

  const Matrix& B() const { return B_; }

 private:
  Matrix A_;
  Vector xi_;
  Matrix B_;
  Vector Atxi_n_;  // n^{-1} A^t xi
  MomentBudget budget_;
};

}  // namespace sgdsat
