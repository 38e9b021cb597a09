#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdsat/solvers.hpp"

namespace sgdsat {

/// Stepsize c0 written relative to c = 1 / max_i ||a_i||^2, e.g. "c/n",
/// "4c/n", "c/(30n)", "c/30", "2c", or a plain number such as "1e-4".
struct ScheduleSpec {
  std::string expr = "c/n";
  double alpha = 0.0;
  bool override_admissibility = false;
};

double resolve_c0(const std::string& expr, double c, int n);

struct ExperimentConfig {
  std::string problem = "phillips";
  int n = 200;
  std::vector<double> nu{1.0};
  std::vector<double> eps{5e-2};
  std::vector<ScheduleSpec> schedules{ScheduleSpec{}};
  int runs = 50;
  double max_epochs = 10'000.0;
  std::uint64_t base_seed = 1;
  std::uint64_t noise_seed = 2024;
  bool preconditioned = false;
  /// "inverse_norm_sq" (eta = n / ||A||^2) or a number used as eta directly.
  std::string landweber_stepsize = "inverse_norm_sq";
  long long landweber_max_iters = 100'000;
  double landweber_early_exit = 4.0;
  /// SGD checkpoint spacing: "epochs" (every `checkpoint_every` epochs) or "geometric".
  std::string checkpoint = "epochs";
  double checkpoint_every = 1.0;
  double checkpoint_factor = 1.05;
  /// Optional epoch window for the log-log rate fit of the mean trajectory.
  std::optional<std::pair<double, double>> fit_window;
  int threads = 0;  // 0: SGDSAT_THREADS or hardware concurrency

  Cadence cadence() const;
};

/// Strict parse: unknown keys, wrong types and invalid values throw
/// Error("bad_config") naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Full-size runs: n = 1000, R = 100.
void apply_full_scale(ExperimentConfig& cfg);

}  // namespace sgdsat
