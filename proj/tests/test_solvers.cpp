#include <doctest.h>

#include <numbers>
#include <random>

#include "sgdsat/error.hpp"
#include "sgdsat/solvers.hpp"
#include "support.hpp"

using namespace sgdsat;

namespace {

InverseInstance small_instance(std::uint64_t seed, double b_norm = 0.3) {
  std::mt19937_64 rng(seed);
  return testsupport::raw_instance(testsupport::scaled_gaussian(6, 4, b_norm, rng), rng, 0.05);
}

// Plain replay of the documented recursion and random stream.
std::vector<double> replay_sgd(const InverseInstance& inst, const StepSchedule& s, long long total,
                               std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, inst.n() - 1);
  Vector x = inst.x1;
  std::vector<double> errs{(x - inst.x_dag).squaredNorm()};
  for (long long k = 1; k <= total; ++k) {
    const int i = pick(gen);
    const double r = inst.A.row(i).dot(x) - inst.y_delta(i);
    x -= s.c0 * std::pow(static_cast<double>(k), -s.alpha) * r * inst.A.row(i).transpose();
    errs.push_back((x - inst.x_dag).squaredNorm());
  }
  return errs;
}

}  // namespace

TEST_CASE("sgd follows the documented recursion and stream") {
  const InverseInstance inst = small_instance(31);
  const double c0 = check_admissible({1.0, 0.0}, inst.A).c0_max;
  for (double alpha : {0.0, 0.4}) {
    const StepSchedule s{c0, alpha};
    SgdOptions o;
    o.cadence = {Cadence::Kind::iterations, 1.0};
    const Trajectory t = sgd_run(inst, s, 20.0, 77, o);
    const auto want = replay_sgd(inst, s, 120, 77);
    REQUIRE(t.checkpoints.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(t.checkpoints[k].iter == static_cast<long long>(k));
      CHECK(t.checkpoints[k].sq_error == doctest::Approx(want[k]).epsilon(1e-11));
    }
  }
}

TEST_CASE("sgd is deterministic per seed and the fast path agrees") {
  const InverseInstance inst = small_instance(32);
  const StepSchedule s{check_admissible({1.0, 0.0}, inst.A).c0_max, 0.0};
  const Trajectory a = sgd_run(inst, s, 50.0, 5);
  const Trajectory b = sgd_run(inst, s, 50.0, 5);
  const Trajectory c = sgd_run(inst, s, 50.0, 6);
  REQUIRE(a.checkpoints.size() == 51);
  std::vector<long long> iters;
  bool differs = false;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    CHECK(a.checkpoints[i].sq_error == b.checkpoints[i].sq_error);
    differs = differs || a.checkpoints[i].sq_error != c.checkpoints[i].sq_error;
    iters.push_back(a.checkpoints[i].iter);
    CHECK(a.checkpoints[i].epoch == doctest::Approx(static_cast<double>(i)));
  }
  CHECK(differs);
  const auto fast = sgd_squared_errors(inst, s, iters, 5);
  for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == doctest::Approx(a.checkpoints[i].sq_error).epsilon(1e-12));
}

TEST_CASE("sgd rejects inadmissible schedules unless overridden") {
  const InverseInstance inst = small_instance(33);
  const double c0_max = check_admissible({1.0, 0.0}, inst.A).c0_max;
  const StepSchedule bad{4.0 * c0_max, 0.0};
  CHECK_FALSE(check_admissible(bad, inst.A).ok);
  try {
    sgd_run(inst, bad, 1.0, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "inadmissible_stepsize");
  }
  SgdOptions o;
  o.override_admissibility = true;
  CHECK_NOTHROW(sgd_run(inst, bad, 1.0, 1, o));
}

TEST_CASE("sgd divergence is reported") {
  const InverseInstance inst = small_instance(34, 0.9);
  SgdOptions o;
  o.override_admissibility = true;
  o.divergence_threshold = 1e6;
  try {
    sgd_run(inst, {50.0, 0.0}, 200.0, 1, o);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == "divergence");
  }
}

TEST_CASE("admissibility constraints") {
  Matrix A = Matrix::Identity(4, 4) * 2.0;
  // ||B|| = 4 / 4 = 1, max row norm 4.
  Admissibility a = check_admissible({0.25 / std::numbers::e * 0.999, 0.0}, A);
  CHECK(a.ok);
  CHECK(a.b_norm == doctest::Approx(1.0));
  CHECK(a.c0_max == doctest::Approx(1.0 / (2 * std::numbers::e)));
  CHECK_FALSE(check_admissible({0.2, 0.0}, A).ok);
  CHECK_FALSE(check_admissible({0.1, 1.0}, A).ok);
  CHECK_FALSE(check_admissible({0.1, 0.0}, A * 2.0).ok);  // ||B|| = 4
  CHECK_FALSE(check_admissible({0.0, 0.0}, A).ok);
}

TEST_CASE("landweber matches a hand iteration") {
  const InverseInstance inst = small_instance(35);
  const double eta = landweber_default_eta(inst.A);
  Eigen::JacobiSVD<Eigen::MatrixXd> dec{Eigen::MatrixXd(inst.A)};
  CHECK(eta == doctest::Approx(6.0 / std::pow(dec.singularValues()(0), 2)));
  const Trajectory t = landweber_run(inst, eta, 40);
  REQUIRE(t.checkpoints.size() == 41);
  Vector x = inst.x1;
  for (int k = 0; k <= 40; ++k) {
    CHECK(t.checkpoints[k].iter == k);
    CHECK(t.checkpoints[k].sq_error == doctest::Approx((x - inst.x_dag).squaredNorm()).epsilon(1e-11));
    CHECK(t.checkpoints[k].residual == doctest::Approx((inst.A * x - inst.y_delta).norm()).epsilon(1e-11));
    x -= eta / 6.0 * inst.A.transpose() * (inst.A * x - inst.y_delta);
  }
}

TEST_CASE("landweber sparse checkpoints and early exit") {
  const InverseInstance inst = small_instance(36);
  LandweberOptions o;
  o.dense_until = 10;
  o.sparse_every = 25;
  const Trajectory t = landweber_run(inst, landweber_default_eta(inst.A), 101, o);
  std::vector<long long> iters;
  for (const auto& c : t.checkpoints) iters.push_back(c.iter);
  std::vector<long long> want{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 25, 50, 75, 100, 101};
  CHECK(iters == want);

  // Diagonal system: the fast mode converges, the slow one amplifies noise.
  InverseInstance d;
  d.A = Matrix::Zero(2, 2);
  d.A(0, 0) = 1.0;
  d.A(1, 1) = 0.05;
  d.x1 = Vector::Zero(2);
  d.x_dag = Vector::Unit(2, 0);
  d.y_dag = d.A * d.x_dag;
  d.xi = 0.05 * Vector::Unit(2, 1);
  d.y_delta = d.y_dag + d.xi;
  d.delta = d.xi.norm();
  LandweberOptions e;
  e.early_exit_ratio = 4.0;
  const Trajectory full = landweber_run(d, 1.0, 20000);
  const Trajectory cut = landweber_run(d, 1.0, 20000, e);
  REQUIRE(cut.checkpoints.size() < full.checkpoints.size());
  for (std::size_t i = 0; i < cut.checkpoints.size(); ++i)
    CHECK(cut.checkpoints[i].sq_error == full.checkpoints[i].sq_error);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < full.checkpoints.size(); ++i)
    if (full.checkpoints[i].sq_error < full.checkpoints[arg].sq_error) arg = i;
  CHECK(arg < cut.checkpoints.size());
  const auto& last = cut.checkpoints.back();
  CHECK(last.sq_error > 4.0 * full.checkpoints[arg].sq_error);
  CHECK(last.iter >= 2 * full.checkpoints[arg].iter + 100);
}

TEST_CASE("checkpoint grids") {
  const auto e = checkpoint_iterations({Cadence::Kind::epochs, 2.0}, 5, 23);
  CHECK(e == std::vector<long long>{0, 10, 20, 23});
  const auto g = checkpoint_iterations({Cadence::Kind::geometric, 1.0, 1.5}, 2, 40);
  CHECK(g == std::vector<long long>{0, 2, 4, 6, 10, 16, 24, 36, 40});
  const auto none = checkpoint_iterations({}, 3, 0);
  CHECK(none == std::vector<long long>{0});
}

TEST_CASE("oracle and a priori stopping") {
  const StopResult s = oracle_stop({1, 2, 3, 4, 5}, {3.0, 1.0, 2.0, 1.0, 4.0});
  CHECK(s.index == 1);
  CHECK(s.k_star == 2.0);
  CHECK(s.e_star == 1.0);
  CHECK_THROWS_AS(oracle_stop({}, {}), Error);
  // (w / delta)^{2 / (3 (1 - alpha))}: 8^{2/3} = 4 with C = 1, nu = 1, alpha = 0.
  CHECK(a_priori_stop(8.0, 1.0, 1.0, 0.0, 1.0) == 4);
  CHECK(a_priori_stop(8.0, 1.0, 1.0, 0.0, 1.1) == 5);
  // 2 / ((1 + 2) (1 - 1/3)) = 1 so the ratio itself.
  CHECK(a_priori_stop(10.0, 2.0, 1.0, 1.0 / 3.0, 1.0) == 5);
  CHECK_THROWS_AS(a_priori_stop(1.0, 0.0, 1.0, 0.0, 1.0), Error);
}
