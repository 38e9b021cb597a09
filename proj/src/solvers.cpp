#include "sgdsat/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

void check_instance(const InverseInstance& inst) {
  require(inst.A.rows() > 0 && inst.A.cols() > 0, "solver: empty matrix");
  require(inst.x1.size() == inst.A.cols() && inst.x_dag.size() == inst.A.cols(),
          "solver: solution vectors must have length m");
  require(inst.y_delta.size() == inst.A.rows(), "solver: data vector must have length n");
}

[[noreturn]] void diverged(const char* method, long long k, double err) {
  fail("divergence", std::string(method) + " diverged: squared error " + std::to_string(err) +
                         " exceeds threshold at iteration " + std::to_string(k));
}

// Runs SGD and calls visit(iter, x) at each requested checkpoint.
//
// The guard tracks ||e||^2 incrementally: with r = a.x - y_i and
// a.e = r + xi_i one update changes ||e||^2 by -2 eta r (a.e) + eta^2 r^2 ||a||^2.
template <class Visit>
void sgd_kernel(const InverseInstance& inst, const StepSchedule& sched,
                const std::vector<long long>& checkpoints, std::uint64_t seed, const SgdOptions& opts,
                Visit&& visit) {
  check_instance(inst);
  require(sched.c0 > 0.0 && sched.alpha >= 0.0 && sched.alpha < 1.0,
          "sgd: schedule needs c0 > 0 and alpha in [0, 1)");
  if (!opts.override_admissibility) {
    const Admissibility adm = check_admissible(sched, inst.A);
    if (!adm.ok) fail("inadmissible_stepsize", "sgd: inadmissible schedule (" + adm.violated + ")");
  }
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()), "sgd: checkpoints must be sorted");
  const long long total = checkpoints.empty() ? 0 : checkpoints.back();
  if (total > opts.iteration_cap) {
    fail("budget_exceeded", "sgd: " + std::to_string(total) + " iterations exceed cap " +
                                std::to_string(opts.iteration_cap));
  }

  const int n = inst.n();
  const int m = inst.m();
  const Vector xi_exact = inst.y_delta - inst.A * inst.x_dag;
  const Vector row_sq = row_norms_squared(inst.A);
  const double* a = inst.A.data();
  const double* y = inst.y_delta.data();

  Vector x = inst.x1;
  double* xp = x.data();
  double err = (x - inst.x_dag).squaredNorm();

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::size_t next = 0;
  long long k = 0;
  while (next < checkpoints.size() && checkpoints[next] == 0) visit(0LL, x), ++next;
  while (next < checkpoints.size()) {
    const long long stop = checkpoints[next];
    for (; k < stop; ++k) {
      const int i = n == 1 ? 0 : pick(gen);
      const double* ai = a + static_cast<std::ptrdiff_t>(i) * m;
      double dot = 0.0;
      for (int j = 0; j < m; ++j) dot += ai[j] * xp[j];
      const double r = dot - y[i];
      const double step = sched.eta(k + 1) * r;
      for (int j = 0; j < m; ++j) xp[j] -= step * ai[j];
      err += step * (step * row_sq(i) - 2.0 * (r + xi_exact(i)));
      if (!(err <= opts.divergence_threshold)) {
        const double exact = (x - inst.x_dag).squaredNorm();
        if (!(exact <= opts.divergence_threshold)) diverged("sgd", k + 1, exact);
        err = exact;
      }
    }
    err = (x - inst.x_dag).squaredNorm();
    while (next < checkpoints.size() && checkpoints[next] == stop) visit(stop, x), ++next;
  }
}

template <class Eta>
Trajectory landweber_kernel(const InverseInstance& inst, Eta&& eta, long long max_iters,
                            const LandweberOptions& opts) {
  check_instance(inst);
  require(max_iters >= 0, "landweber: max_iters must be >= 0");
  const double inv_n = 1.0 / inst.n();
  const Eigen::MatrixXd A = inst.A;
  Trajectory t;
  t.method = Method::landweber;
  Vector x = inst.x1;
  Vector r = A * x - inst.y_delta;
  auto record = [&](long long k) {
    const double e = (x - inst.x_dag).squaredNorm();
    if (!(e <= opts.divergence_threshold)) diverged("landweber", k, e);
    t.checkpoints.push_back({k, k * inv_n, e, r.norm()});
  };
  record(0);
  double best = t.checkpoints.back().sq_error;
  long long best_k = 0;
  for (long long k = 1; k <= max_iters; ++k) {
    x.noalias() -= (eta(k) * inv_n) * (A.transpose() * r);
    r.noalias() = A * x;
    r -= inst.y_delta;
    const bool keep = k <= opts.dense_until || k % opts.sparse_every == 0 || k == max_iters;
    if (!keep) continue;
    record(k);
    const double e = t.checkpoints.back().sq_error;
    if (e < best) best = e, best_k = k;
    if (opts.early_exit_ratio > 0.0 && e > opts.early_exit_ratio * best && k >= 2 * best_k + 100) break;
  }
  return t;
}

}  // namespace

Admissibility check_admissible(const StepSchedule& sched, const Matrix& A) {
  Admissibility out;
  const double max_row = row_norms_squared(A).maxCoeff();
  const double s = spectral_norm(A);
  out.b_norm = s * s / static_cast<double>(A.rows());
  const double bound_row = max_row > 0.0 ? 1.0 / max_row : INFINITY;
  const double bound_spec = out.b_norm > 0.0 ? 1.0 / (2.0 * std::numbers::e * out.b_norm) : INFINITY;
  out.c0_max = std::min({bound_row, 1.0, bound_spec});
  auto add = [&out](const std::string& what) {
    out.ok = false;
    out.violated += out.violated.empty() ? what : "; " + what;
  };
  const double slack = 1.0 + 1e-12;
  if (!(sched.c0 > 0.0)) add("c0 > 0");
  if (!(sched.alpha >= 0.0 && sched.alpha < 1.0)) add("alpha in [0,1)");
  if (sched.c0 * max_row > slack) add("c0 <= 1/max_i||a_i||^2");
  if (sched.c0 > slack) add("c0 <= 1");
  if (sched.c0 * out.b_norm > slack / (2.0 * std::numbers::e)) add("c0*||B|| <= 1/(2e)");
  if (out.b_norm > slack) add("||B|| <= 1");
  return out;
}

std::vector<long long> checkpoint_iterations(const Cadence& cadence, int n, long long total_iters) {
  require(n >= 1 && total_iters >= 0, "checkpoint_iterations: bad arguments");
  std::vector<long long> out{0};
  auto push = [&out](long long k) {
    if (k > out.back()) out.push_back(k);
  };
  switch (cadence.kind) {
    case Cadence::Kind::iterations: {
      require(cadence.every >= 1.0, "cadence: iteration spacing must be >= 1");
      const auto step = static_cast<long long>(cadence.every);
      for (long long k = step; k < total_iters; k += step) push(k);
      break;
    }
    case Cadence::Kind::epochs: {
      require(cadence.every > 0.0, "cadence: epoch spacing must be > 0");
      for (long long j = 1;; ++j) {
        const auto k = static_cast<long long>(std::llround(j * cadence.every * n));
        if (k >= total_iters) break;
        push(k);
      }
      break;
    }
    case Cadence::Kind::geometric: {
      require(cadence.factor > 1.0, "cadence: geometric factor must exceed 1");
      for (double e = 1.0;; e = std::max(e + 1.0, std::ceil(e * cadence.factor))) {
        const auto k = static_cast<long long>(e) * n;
        if (k >= total_iters) break;
        push(k);
      }
      break;
    }
  }
  push(total_iters);
  return out;
}

Trajectory sgd_run(const InverseInstance& inst, const StepSchedule& sched, double max_epochs,
                   std::uint64_t seed, const SgdOptions& opts) {
  require(max_epochs >= 0.0, "sgd: max_epochs must be >= 0");
  const int n = inst.n();
  const long long total = std::llround(max_epochs * n);
  const std::vector<long long> ks = checkpoint_iterations(opts.cadence, n, total);
  Trajectory t;
  t.method = Method::sgd;
  t.seed = seed;
  t.schedule = sched;
  t.checkpoints.reserve(ks.size());
  sgd_kernel(inst, sched, ks, seed, opts, [&](long long k, const Vector& x) {
    const double e = (x - inst.x_dag).squaredNorm();
    const double r = opts.cadence.with_residual ? (inst.A * x - inst.y_delta).norm() : 0.0;
    t.checkpoints.push_back({k, static_cast<double>(k) / n, e, r});
  });
  return t;
}

std::vector<double> sgd_squared_errors(const InverseInstance& inst, const StepSchedule& sched,
                                       const std::vector<long long>& checkpoints, std::uint64_t seed,
                                       const SgdOptions& opts) {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  sgd_kernel(inst, sched, checkpoints, seed, opts,
             [&](long long, const Vector& x) { out.push_back((x - inst.x_dag).squaredNorm()); });
  return out;
}

Trajectory landweber_run(const InverseInstance& inst, double eta, long long max_iters,
                         const LandweberOptions& opts) {
  require(eta > 0.0, "landweber: eta must be > 0");
  Trajectory t = landweber_kernel(inst, [eta](long long) { return eta; }, max_iters, opts);
  t.schedule = {eta, 0.0};
  return t;
}

Trajectory landweber_run(const InverseInstance& inst, const StepSchedule& sched, long long max_iters,
                         const LandweberOptions& opts) {
  require(sched.c0 > 0.0, "landweber: c0 must be > 0");
  Trajectory t = landweber_kernel(inst, [&sched](long long k) { return sched.eta(k); }, max_iters, opts);
  t.schedule = sched;
  return t;
}

double landweber_default_eta(const Matrix& A) {
  const double s = spectral_norm(A);
  require(s > 0.0, "landweber: zero matrix");
  return static_cast<double>(A.rows()) / (s * s);
}

StopResult oracle_stop(const std::vector<double>& positions, const std::vector<double>& values) {
  require(!values.empty(), "oracle_stop: empty series");
  require(positions.size() == values.size(), "oracle_stop: positions and values differ in length");
  StopResult out;
  out.index = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[out.index]) out.index = i;
  }
  out.k_star = positions[out.index];
  out.e_star = values[out.index];
  return out;
}

long long a_priori_stop(double w_norm, double delta, double nu, double alpha, double C) {
  if (!(delta > 0.0)) fail("invalid_argument", "a_priori_stop: delta must be > 0");
  require(w_norm > 0.0, "a_priori_stop: w_norm must be > 0");
  require(nu > 0.5, "a_priori_stop: nu must exceed 1/2");
  require(alpha >= 0.0 && alpha < 1.0, "a_priori_stop: alpha must lie in [0, 1)");
  require(C > 0.0, "a_priori_stop: C must be > 0");
  const double v = C * std::pow(w_norm / delta, 2.0 / ((1.0 + 2.0 * nu) * (1.0 - alpha)));
  // Guard against pow landing one ulp above an exact integer.
  return static_cast<long long>(std::ceil(v * (1.0 - 1e-12)));
}

}  // namespace sgdsat
