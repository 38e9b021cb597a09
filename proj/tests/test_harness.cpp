#include <doctest.h>

#include <cstdlib>
#include <random>
#include <stdexcept>

#include "sgdsat/error.hpp"
#include "sgdsat/harness.hpp"
#include "sgdsat/parallel.hpp"
#include "support.hpp"

using namespace sgdsat;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.problem = "phillips";
  cfg.n = 48;
  cfg.nu = {1.0};
  cfg.eps = {1e-2};
  cfg.schedules = {ScheduleSpec{"c/n", 0.0, false}};
  cfg.runs = 6;
  cfg.max_epochs = 40;
  cfg.landweber_max_iters = 400;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("log-log fit recovers exact power laws") {
  std::vector<double> x, y;
  for (int k = 1; k <= 50; ++k) {
    x.push_back(k);
    y.push_back(7.0 * std::pow(k, -3.0));
  }
  const FitResult f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.slope_stderr < 1e-10);
  CHECK(f.points == 50);

  const FitResult w = fit_rate(x, y, 10.0, 30.0);
  CHECK(w.points == 21);
  CHECK(w.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_rate(x, y, 10.0, 15.0), Error);
  y[20] = 0.0;
  CHECK_THROWS_AS(fit_rate(x, y, 10.0, 30.0), Error);
}

TEST_CASE("log-log fit against closed form least squares") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  std::vector<double> x, y;
  for (int k = 0; k < 30; ++k) {
    x.push_back(1.0 + k * 0.7);
    y.push_back(std::exp(0.3 - 1.2 * std::log(x.back()) + 0.1 * g(rng)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::log(x[i]), v = std::log(y[i]);
    sx += u, sy += v, sxx += u * u, sxy += u * v;
  }
  const double n = static_cast<double>(x.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const FitResult f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(slope).epsilon(1e-10));
  CHECK(f.intercept == doctest::Approx((sy - slope * sx) / n).epsilon(1e-10));
}

TEST_CASE("noise exponent of a four-thirds law") {
  const std::vector<double> d{1e-3, 5e-3, 1e-2, 5e-2, 1e-1};
  std::vector<double> e;
  for (double v : d) e.push_back(0.2 * std::pow(v, 4.0 / 3.0));
  CHECK(noise_exponent(d, e).slope == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(noise_exponent({1e-3, 1e-2, 1e-1}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(noise_exponent({0.0, 1e-3, 1e-2, 1e-1}, {1, 2, 3, 4}), Error);
}

TEST_CASE("parallel map keeps slot order and surfaces the first error") {
  const auto v = parallel_map<int>(100, 4, [](std::size_t t) { return static_cast<int>(t * t); });
  for (std::size_t t = 0; t < v.size(); ++t) CHECK(v[t] == static_cast<int>(t * t));
  try {
    parallel_map<int>(50, 3, [](std::size_t t) -> int {
      if (t == 7 || t == 30) throw std::runtime_error("slot " + std::to_string(t));
      return 0;
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "slot 7");
  }
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  ::setenv("SGDSAT_THREADS", "5", 1);
  CHECK(resolve_threads(0) == 5);
  ::setenv("SGDSAT_THREADS", "many", 1);
  CHECK_THROWS_AS(resolve_threads(0), Error);
  ::unsetenv("SGDSAT_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("monte carlo is independent of the thread count") {
  std::mt19937_64 rng(72);
  const InverseInstance inst = testsupport::raw_instance(testsupport::scaled_gaussian(5, 4, 0.4, rng), rng, 0.05);
  const StepSchedule s{check_admissible({1.0, 0.0}, inst.A).c0_max, 0.0};
  const std::vector<long long> iters{0, 5, 50, 200};
  const McTrajectory a = monte_carlo(inst, s, iters, 37, 11, 1);
  const McTrajectory b = monte_carlo(inst, s, iters, 37, 11, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_mean == b.stderr_mean);
  CHECK(a.run_min == b.run_min);
  CHECK(a.runs == 37);
  // Run r uses seed base + r.
  double m = 0.0;
  for (int r = 0; r < 37; ++r) m += sgd_squared_errors(inst, s, iters, 11 + r)[2];
  CHECK(a.mean[2] == doctest::Approx(m / 37).epsilon(1e-12));
  CHECK(a.mean[0] == doctest::Approx((inst.x1 - inst.x_dag).squaredNorm()));
  for (std::size_t r = 0; r < a.run_argmin.size(); ++r) CHECK(a.run_argmin[r] > 0);
}

TEST_CASE("comparison cells") {
  ExperimentConfig cfg = tiny_config();
  cfg.eps = {1e-2, 5e-2};
  cfg.schedules.push_back(ScheduleSpec{"c/(2n)", 0.0, false});
  const auto rows = run_comparison(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].eps == 1e-2);
  CHECK(rows[1].schedule == "c/(2n)");
  CHECK(rows[2].eps == 5e-2);
  double c = 0.0;
  const InverseInstance inst = build_instance(cfg, 1.0, 1e-2, &c);
  CHECK(rows[0].c0 == doctest::Approx(c / 48));
  CHECK(rows[1].c0 == doctest::Approx(c / 96));
  for (const auto& r : rows) {
    CHECK(r.e_sgd > 0.0);
    CHECK(r.k_sgd > 0.0);
    CHECK(r.k_lm >= 1);
    CHECK(r.admissible);
    CHECK(r.runs == 6);
    CHECK(std::isnan(r.slope));
  }
  CHECK(rows[0].delta == doctest::Approx(inst.delta));
  // Shared noise realization: the 5e-2 data equal the 1e-2 data scaled up.
  const InverseInstance hi = build_instance(cfg, 1.0, 5e-2);
  CHECK((hi.xi - 5.0 * inst.xi).norm() < 1e-12 * hi.xi.norm());
  const auto again = run_comparison(cfg);
  CHECK(again[3].e_sgd == rows[3].e_sgd);
  CHECK(again[3].k_sgd == rows[3].k_sgd);
}

TEST_CASE("inadmissible schedules need an override") {
  ExperimentConfig cfg = tiny_config();
  cfg.schedules = {ScheduleSpec{"1.1c", 0.0, false}};
  cfg.runs = 2;
  cfg.max_epochs = 2;
  try {
    run_comparison(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "inadmissible_stepsize");
  }
  const auto rows = run_comparison(cfg, true);
  CHECK_FALSE(rows[0].admissible);
  CHECK_FALSE(rows[0].admissibility.empty());
}

TEST_CASE("rate fit window and noise-rate study") {
  ExperimentConfig cfg = tiny_config();
  cfg.eps = {0.0};
  cfg.checkpoint = "geometric";
  cfg.max_epochs = 400;
  cfg.fit_window = std::pair{20.0, 400.0};
  const auto rows = run_comparison(cfg);
  CHECK(rows[0].slope < 0.0);
  CHECK(rows[0].fit_r2 > 0.5);

  ExperimentConfig nr = tiny_config();
  nr.eps = {1e-3, 5e-3, 1e-2, 5e-2};
  nr.max_epochs = 200;
  const auto rates = rate_vs_noise(nr);
  REQUIRE(rates.size() == 1);
  CHECK(rates[0].deltas.size() == 4);
  CHECK(rates[0].fit.slope > 0.0);
}

TEST_CASE("paired preconditioning study") {
  ExperimentConfig cfg = tiny_config();
  const auto pairs = preconditioning_study(cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].landweber_max_rel_diff <= 1e-12);
  CHECK(pairs[0].plain.c0 == pairs[0].preconditioned.c0);
  CHECK(pairs[0].preconditioned.preconditioned);
  CHECK(pairs[0].rel_diff_e_sgd ==
        doctest::Approx((pairs[0].preconditioned.e_sgd - pairs[0].plain.e_sgd) / pairs[0].plain.e_sgd));
}
