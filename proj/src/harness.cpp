#include "sgdsat/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgdsat/error.hpp"
#include "sgdsat/parallel.hpp"
#include "sgdsat/testproblems.hpp"

namespace sgdsat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  InverseInstance inst;
  double c = 0.0;
  Trajectory landweber;
};

double landweber_eta(const ExperimentConfig& cfg, const Matrix& A) {
  return cfg.landweber_stepsize == "inverse_norm_sq" ? landweber_default_eta(A) : std::stod(cfg.landweber_stepsize);
}

Trajectory run_landweber(const ExperimentConfig& cfg, const InverseInstance& inst, double eta) {
  LandweberOptions lo;
  lo.early_exit_ratio = inst.eps > 0.0 ? cfg.landweber_early_exit : 0.0;
  return landweber_run(inst, eta, cfg.landweber_max_iters, lo);
}

Trajectory run_landweber(const ExperimentConfig& cfg, const InverseInstance& inst) {
  return run_landweber(cfg, inst, landweber_eta(cfg, inst.A));
}

Cell make_cell(const ExperimentConfig& cfg, const TestProblem& prob, double nu, double eps) {
  Cell cell;
  cell.inst = make_instance(prob, nu, eps, cfg.noise_seed);
  cell.c = reference_stepsize(cell.inst.A);
  if (cfg.preconditioned) cell.inst = precondition_instance(cell.inst);
  cell.landweber = run_landweber(cfg, cell.inst);
  return cell;
}

StopResult landweber_stop(const Trajectory& t) {
  std::vector<double> pos;
  std::vector<double> val;
  for (const auto& cp : t.checkpoints) {
    if (cp.iter == 0 && t.checkpoints.size() > 1) continue;
    pos.push_back(static_cast<double>(cp.iter));
    val.push_back(cp.sq_error);
  }
  return oracle_stop(pos, val);
}

double sample_stderr(const std::vector<double>& v) {
  const std::size_t r = v.size();
  if (r < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(r);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r));
}

CellResult run_schedule(const ExperimentConfig& cfg, const Cell& cell, const ScheduleSpec& spec, bool override_all,
                        int threads) {
  const InverseInstance& inst = cell.inst;
  const int n = inst.n();
  CellResult out;
  RunSummary& s = out.summary;
  s.problem = problem_name(parse_problem(cfg.problem));
  s.n = n;
  s.nu = inst.nu;
  s.eps = inst.eps;
  s.delta = inst.delta;
  s.schedule = spec.expr;
  s.alpha = spec.alpha;
  s.c0 = resolve_c0(spec.expr, cell.c, n);
  s.preconditioned = cfg.preconditioned;
  s.runs = cfg.runs;
  s.max_epochs = cfg.max_epochs;

  const StepSchedule sched{s.c0, spec.alpha};
  const Admissibility adm = check_admissible(sched, inst.A);
  s.admissible = adm.ok;
  s.admissibility = adm.violated;
  const bool override_adm = override_all || spec.override_admissibility;
  if (!adm.ok && !override_adm) {
    fail("inadmissible_stepsize", "schedule '" + spec.expr + "' (c0 = " + std::to_string(s.c0) +
                                 ") is inadmissible: " + adm.violated + "; pass --override-admissibility to run it");
  }

  SgdOptions so;
  so.override_admissibility = override_adm;
  so.cadence = cfg.cadence();
  const auto total = static_cast<long long>(std::llround(cfg.max_epochs * n));
  const std::vector<long long> iters = checkpoint_iterations(so.cadence, n, total);
  McTrajectory mc;
  try {
    mc = monte_carlo(inst, sched, iters, cfg.runs, cfg.base_seed, threads, so);
  } catch (const Error& e) {
    fail(e.code(), "cell nu = " + std::to_string(s.nu) + ", eps = " + std::to_string(s.eps) + ", c0 = " + spec.expr +
                       ": " + e.what());
  }

  std::vector<double> epochs(iters.size());
  for (std::size_t t = 0; t < iters.size(); ++t) epochs[t] = static_cast<double>(iters[t]) / n;
  const std::size_t first = iters.size() > 1 ? 1 : 0;
  std::vector<double> pos(epochs.begin() + first, epochs.end());
  std::vector<double> val(mc.mean.begin() + first, mc.mean.end());
  const StopResult st = oracle_stop(pos, val);
  s.e_sgd = st.e_star;
  s.k_sgd_mean_traj = st.k_star;
  std::vector<double> k_runs(mc.run_argmin.size());
  double ksum = 0.0;
  for (std::size_t r = 0; r < k_runs.size(); ++r) {
    k_runs[r] = mc.run_argmin[r] / n;
    ksum += k_runs[r];
  }
  s.k_sgd = ksum / static_cast<double>(k_runs.size());
  s.k_sgd_stderr = sample_stderr(k_runs);
  s.e_sgd_stderr = sample_stderr(mc.run_min);

  const StopResult lw = landweber_stop(cell.landweber);
  s.e_lm = lw.e_star;
  s.k_lm = static_cast<long long>(lw.k_star);

  s.slope = s.slope_stderr = s.fit_r2 = kNaN;
  if (cfg.fit_window) {
    const FitResult f = fit_rate(epochs, mc.mean, cfg.fit_window->first, cfg.fit_window->second);
    s.slope = f.slope;
    s.slope_stderr = f.slope_stderr;
    s.fit_r2 = f.r2;
  }
  if (inst.eps == 0.0) {
    const std::size_t burn = std::max<std::size_t>(1, iters.size() / 10);
    for (std::size_t t = burn + 1; t < iters.size(); ++t) {
      const double tol = 3.0 * std::max(mc.stderr_mean[t], mc.stderr_mean[t - 1]) + 1e-15;
      if (mc.mean[t] > mc.mean[t - 1] + tol) s.exact_monotone = false;
    }
  }

  out.trace.epochs = std::move(epochs);
  out.trace.mean = std::move(mc.mean);
  out.trace.stderr_mean = std::move(mc.stderr_mean);
  for (const auto& cp : cell.landweber.checkpoints) {
    out.trace.lm_iters.push_back(cp.iter);
    out.trace.lm_sq_error.push_back(cp.sq_error);
  }
  return out;
}

}  // namespace

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "fit: length mismatch");
  require(x.size() >= 2, "fit: need at least 2 points");
  const auto N = static_cast<double>(x.size());
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!(x[t] > 0.0) || !(y[t] > 0.0)) fail("invalid_argument", "fit: nonpositive value in the fit window");
    lx[t] = std::log(x[t]);
    ly[t] = std::log(y[t]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t t = 0; t < lx.size(); ++t) mx += lx[t], my += ly[t];
  mx /= N;
  my /= N;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t t = 0; t < lx.size(); ++t) {
    sxx += (lx[t] - mx) * (lx[t] - mx);
    sxy += (lx[t] - mx) * (ly[t] - my);
    syy += (ly[t] - my) * (ly[t] - my);
  }
  require(sxx > 0.0, "fit: positions must not all coincide");
  FitResult f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ssr = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (N - 2.0) / sxx) : 0.0;
  return f;
}

FitResult fit_rate(const std::vector<double>& positions, const std::vector<double>& values, double lo, double hi) {
  require(positions.size() == values.size(), "fit_rate: length mismatch");
  require(lo > 0.0 && hi > lo, "fit_rate: window must satisfy 0 < lo < hi");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t t = 0; t < positions.size(); ++t) {
    if (positions[t] >= lo && positions[t] <= hi) {
      if (!(values[t] > 0.0)) fail("invalid_argument", "fit_rate: nonpositive value in the fit window");
      x.push_back(positions[t]);
      y.push_back(values[t]);
    }
  }
  if (x.size() < 10) {
    fail("invalid_argument", "fit_rate: window [" + std::to_string(lo) + ", " + std::to_string(hi) + "] holds " +
                                 std::to_string(x.size()) + " checkpoints, need at least 10");
  }
  return fit_loglog(x, y);
}

McTrajectory monte_carlo(const InverseInstance& inst, const StepSchedule& sched, const std::vector<long long>& iters,
                         int runs, std::uint64_t base_seed, int threads, const SgdOptions& opts) {
  require(runs >= 1, "monte_carlo: need at least one run");
  require(!iters.empty(), "monte_carlo: no checkpoints");
  const int workers = resolve_threads(threads);
  const auto per_run = parallel_map<std::vector<double>>(static_cast<std::size_t>(runs), workers, [&](std::size_t r) {
    return sgd_squared_errors(inst, sched, iters, base_seed + r, opts);
  });

  McTrajectory mc;
  mc.iters = iters;
  mc.runs = runs;
  const std::size_t T = iters.size();
  mc.mean.assign(T, 0.0);
  mc.stderr_mean.assign(T, 0.0);
  // Fixed run order in every sum keeps the result independent of scheduling.
  for (const auto& traj : per_run)
    for (std::size_t t = 0; t < T; ++t) mc.mean[t] += traj[t];
  for (double& v : mc.mean) v /= runs;
  if (runs > 1) {
    for (const auto& traj : per_run)
      for (std::size_t t = 0; t < T; ++t) mc.stderr_mean[t] += (traj[t] - mc.mean[t]) * (traj[t] - mc.mean[t]);
    for (double& v : mc.stderr_mean) v = std::sqrt(v / (runs - 1.0) / runs);
  }
  const std::size_t first = T > 1 && iters[0] == 0 ? 1 : 0;
  for (const auto& traj : per_run) {
    std::size_t best = first;
    for (std::size_t t = first + 1; t < T; ++t)
      if (traj[t] < traj[best]) best = t;
    mc.run_min.push_back(traj[best]);
    mc.run_argmin.push_back(static_cast<double>(iters[best]));
  }
  return mc;
}

InverseInstance build_instance(const ExperimentConfig& cfg, double nu, double eps, double* c_ref) {
  const TestProblem prob = make_problem(cfg.problem, cfg.n);
  InverseInstance inst = make_instance(prob, nu, eps, cfg.noise_seed);
  if (c_ref) *c_ref = reference_stepsize(inst.A);
  if (cfg.preconditioned) inst = precondition_instance(inst);
  return inst;
}

std::vector<CellResult> run_cells(const ExperimentConfig& cfg, bool override_admissibility) {
  const TestProblem prob = make_problem(cfg.problem, cfg.n);
  const int threads = resolve_threads(cfg.threads);
  std::vector<CellResult> out;
  for (double nu : cfg.nu) {
    for (double eps : cfg.eps) {
      const Cell cell = make_cell(cfg, prob, nu, eps);
      for (const auto& spec : cfg.schedules) out.push_back(run_schedule(cfg, cell, spec, override_admissibility, threads));
    }
  }
  return out;
}

std::vector<RunSummary> run_comparison(const ExperimentConfig& cfg, bool override_admissibility) {
  std::vector<RunSummary> out;
  for (auto& c : run_cells(cfg, override_admissibility)) out.push_back(std::move(c.summary));
  return out;
}

FitResult noise_exponent(const std::vector<double>& deltas, const std::vector<double>& e_stars) {
  if (deltas.size() < 4) fail("invalid_argument", "rate_vs_noise: need at least 4 noise levels");
  return fit_loglog(deltas, e_stars);
}

std::vector<NoiseRate> rate_vs_noise(const ExperimentConfig& cfg, bool override_admissibility) {
  std::vector<double> levels;
  for (double e : cfg.eps) {
    if (!(e > 0.0)) fail("invalid_argument", "rate_vs_noise: noise levels must be positive");
    if (std::find(levels.begin(), levels.end(), e) == levels.end()) levels.push_back(e);
  }
  if (levels.size() < 4) fail("invalid_argument", "rate_vs_noise: need at least 4 distinct noise levels");
  const auto rows = run_comparison(cfg, override_admissibility);
  std::vector<NoiseRate> out;
  const std::size_t S = cfg.schedules.size();
  const std::size_t E = cfg.eps.size();
  for (std::size_t v = 0; v < cfg.nu.size(); ++v) {
    for (std::size_t s = 0; s < S; ++s) {
      NoiseRate nr;
      nr.nu = cfg.nu[v];
      nr.schedule = cfg.schedules[s].expr;
      for (std::size_t e = 0; e < E; ++e) {
        const RunSummary& r = rows[(v * E + e) * S + s];
        nr.deltas.push_back(r.delta);
        nr.e_stars.push_back(r.e_sgd);
      }
      nr.fit = noise_exponent(nr.deltas, nr.e_stars);
      out.push_back(std::move(nr));
    }
  }
  return out;
}

std::vector<PairedSummary> preconditioning_study(const ExperimentConfig& cfg, bool override_admissibility) {
  const TestProblem prob = make_problem(cfg.problem, cfg.n);
  const int threads = resolve_threads(cfg.threads);
  ExperimentConfig plain_cfg = cfg;
  plain_cfg.preconditioned = false;
  ExperimentConfig pre_cfg = cfg;
  pre_cfg.preconditioned = true;
  std::vector<PairedSummary> out;
  for (double nu : cfg.nu) {
    for (double eps : cfg.eps) {
      const Cell plain = make_cell(plain_cfg, prob, nu, eps);
      Cell pre;
      pre.inst = precondition_instance(plain.inst);
      pre.c = plain.c;
      pre.landweber = run_landweber(cfg, pre.inst, landweber_eta(cfg, plain.inst.A));
      double lw_diff = 0.0;
      const std::size_t L = std::min(plain.landweber.checkpoints.size(), pre.landweber.checkpoints.size());
      for (std::size_t t = 0; t < L; ++t) {
        const double a = plain.landweber.checkpoints[t].sq_error;
        const double b = pre.landweber.checkpoints[t].sq_error;
        const double scale = std::max(std::abs(a), std::numeric_limits<double>::min());
        lw_diff = std::max(lw_diff, std::abs(a - b) / scale);
      }
      for (const auto& spec : cfg.schedules) {
        PairedSummary p;
        p.plain = run_schedule(plain_cfg, plain, spec, override_admissibility, threads).summary;
        p.preconditioned = run_schedule(pre_cfg, pre, spec, override_admissibility, threads).summary;
        p.rel_diff_e_sgd = (p.preconditioned.e_sgd - p.plain.e_sgd) / p.plain.e_sgd;
        p.landweber_max_rel_diff = lw_diff;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

}  // namespace sgdsat
