#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgdsat/config.hpp"
#include "sgdsat/instances.hpp"
#include "sgdsat/solvers.hpp"

namespace sgdsat {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

/// Least squares of log y on log x over all points (x, y > 0, at least 2 points).
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Log-log fit of a trajectory restricted to positions in [lo, hi]. Needs at
/// least 10 points in the window, all with positive values.
FitResult fit_rate(const std::vector<double>& positions, const std::vector<double>& values, double lo, double hi);

/// Seeded Monte Carlo over R runs with seeds base_seed + r.
struct McTrajectory {
  std::vector<long long> iters;
  std::vector<double> mean;
  std::vector<double> stderr_mean;  // sample std / sqrt(R) per checkpoint
  std::vector<double> run_min;      // per-run minimum over iters > 0
  std::vector<double> run_argmin;   // iteration of that minimum
  int runs = 0;
};

McTrajectory monte_carlo(const InverseInstance& inst, const StepSchedule& sched, const std::vector<long long>& iters,
                         int runs, std::uint64_t base_seed, int threads, const SgdOptions& opts = {});

struct RunSummary {
  std::string problem;
  int n = 0;
  double nu = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  std::string schedule;
  double c0 = 0.0;
  double alpha = 0.0;
  bool admissible = true;
  std::string admissibility;  // violated constraints when overridden
  bool preconditioned = false;
  int runs = 0;
  double max_epochs = 0.0;

  double e_sgd = 0.0;            // min of the mean squared-error trajectory
  double k_sgd = 0.0;            // mean of per-run argmin epochs
  double k_sgd_mean_traj = 0.0;  // argmin epoch of the mean trajectory
  double e_sgd_stderr = 0.0;     // standard error of the per-run minima
  double k_sgd_stderr = 0.0;
  double e_lm = 0.0;
  long long k_lm = 0;  // iterations
  double slope = 0.0;  // NaN when no fit window is configured
  double slope_stderr = 0.0;
  double fit_r2 = 0.0;
  bool exact_monotone = true;  // exact data only: mean never rises by more than 3 stderr after burn-in
};

struct CellTrace {
  std::vector<double> epochs;
  std::vector<double> mean;
  std::vector<double> stderr_mean;
  std::vector<long long> lm_iters;
  std::vector<double> lm_sq_error;
};

struct CellResult {
  RunSummary summary;
  CellTrace trace;
};

/// Problem instance for one (nu, eps) cell, preconditioned if requested.
/// `c_ref` receives c = 1 / max_i ||a_i||^2 of the unpreconditioned matrix.
InverseInstance build_instance(const ExperimentConfig& cfg, double nu, double eps, double* c_ref = nullptr);

/// Every (nu, eps, schedule) cell, ordered nu-major then eps then schedule.
std::vector<CellResult> run_cells(const ExperimentConfig& cfg, bool override_admissibility = false);
std::vector<RunSummary> run_comparison(const ExperimentConfig& cfg, bool override_admissibility = false);

struct NoiseRate {
  double nu = 0.0;
  std::string schedule;
  std::vector<double> deltas;
  std::vector<double> e_stars;
  FitResult fit;  // slope = exponent of e_star against delta
};

/// Exponent of e_star = min mean squared error against delta.
FitResult noise_exponent(const std::vector<double>& deltas, const std::vector<double>& e_stars);
/// Needs at least 4 positive noise levels.
std::vector<NoiseRate> rate_vs_noise(const ExperimentConfig& cfg, bool override_admissibility = false);

struct PairedSummary {
  RunSummary plain;
  RunSummary preconditioned;
  double rel_diff_e_sgd = 0.0;          // (e(A~) - e(A)) / e(A)
  double landweber_max_rel_diff = 0.0;  // over all checkpoints
};

/// Both variants with matched seeds and the same numeric c0 (from A).
std::vector<PairedSummary> preconditioning_study(const ExperimentConfig& cfg, bool override_admissibility = false);

}  // namespace sgdsat
