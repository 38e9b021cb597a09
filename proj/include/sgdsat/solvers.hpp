#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgdsat/instances.hpp"
#include "sgdsat/numerics.hpp"

namespace sgdsat {

struct StepSchedule {
  double c0 = 0.0;
  double alpha = 0.0;

  /// eta_k = c0 k^{-alpha}, k >= 1 the global iteration counter.
  double eta(long long k) const { return alpha == 0.0 ? c0 : c0 * std::pow(static_cast<double>(k), -alpha); }
};

struct Admissibility {
  bool ok = true;
  std::string violated;  // empty when ok, otherwise the failing constraint(s)
  double c0_max = 0.0;
  double b_norm = 0.0;
};

/// Checks c0 <= min(1/max||a_i||^2, 1), c0 ||B|| <= 1/(2e), ||B|| <= 1 and
/// alpha in [0, 1).
Admissibility check_admissible(const StepSchedule& sched, const Matrix& A);

enum class Method { sgd, landweber };

struct Checkpoint {
  long long iter = 0;  // number of updates performed; 0 is the initial guess
  double epoch = 0.0;  // iter / n
  double sq_error = 0.0;
  double residual = 0.0;
};

struct Trajectory {
  Method method = Method::sgd;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t seed = 0;
  StepSchedule schedule;
};

struct Cadence {
  enum class Kind { epochs, iterations, geometric };
  Kind kind = Kind::epochs;
  double every = 1.0;    // epochs (epochs kind) or iterations (iterations kind)
  double factor = 1.05;  // geometric growth in epoch units
  bool with_residual = true;
};

/// Iteration counts (including 0 and the final iteration) at which a run of
/// `total_iters` updates on n rows is checkpointed.
std::vector<long long> checkpoint_iterations(const Cadence& cadence, int n, long long total_iters);

struct SgdOptions {
  Cadence cadence;
  bool override_admissibility = false;
  long long iteration_cap = 20'000'000'000LL;
  double divergence_threshold = 1e12;
};

/// x_{k+1} = x_k - eta_k ((a_i, x_k) - y_i) a_i with i uniform on {0..n-1},
/// drawn from a 64-bit Mersenne twister seeded with `seed`.
Trajectory sgd_run(const InverseInstance& inst, const StepSchedule& sched, double max_epochs,
                   std::uint64_t seed, const SgdOptions& opts = {});

/// Squared errors only, at explicit checkpoint iterations (sorted, starting
/// anywhere >= 0). Same random stream as sgd_run for equal seeds.
std::vector<double> sgd_squared_errors(const InverseInstance& inst, const StepSchedule& sched,
                                       const std::vector<long long>& checkpoints, std::uint64_t seed,
                                       const SgdOptions& opts = {});

struct LandweberOptions {
  long long dense_until = 10'000;  // checkpoint every iteration up to here
  long long sparse_every = 100;    // then every this many iterations
  double divergence_threshold = 1e12;
  /// Stop once the error exceeds this multiple of the running minimum and at
  /// least 2 k_min + 100 iterations have run; 0 disables.
  double early_exit_ratio = 0.0;
};

/// x_{k+1} = x_k - eta n^{-1} A^t (A x_k - y).
Trajectory landweber_run(const InverseInstance& inst, double eta, long long max_iters,
                         const LandweberOptions& opts = {});

/// Same recursion with the varying stepsize sched.eta(k).
Trajectory landweber_run(const InverseInstance& inst, const StepSchedule& sched, long long max_iters,
                         const LandweberOptions& opts = {});

/// eta = n / ||A||^2, which turns the recursion into x - ||A||^{-2} A^t (A x - y).
double landweber_default_eta(const Matrix& A);

struct StopResult {
  double k_star = 0.0;
  double e_star = 0.0;
  std::size_t index = 0;
};

/// Argmin of the series, ties toward the smaller position.
StopResult oracle_stop(const std::vector<double>& positions, const std::vector<double>& values);

/// ceil(C (w_norm / delta)^{2 / ((1 + 2 nu)(1 - alpha))}).
long long a_priori_stop(double w_norm, double delta, double nu, double alpha, double C);

}  // namespace sgdsat
