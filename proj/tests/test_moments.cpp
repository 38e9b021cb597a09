#include <doctest.h>

#include <random>

#include "sgdsat/error.hpp"
#include "sgdsat/harness.hpp"
#include "sgdsat/moments.hpp"
#include "support.hpp"

using namespace sgdsat;

namespace {

struct Exact {
  Vector mean;
  Matrix second;
};

// Average over all n^steps equally likely index paths.
Exact enumerate_paths(const InverseInstance& inst, const StepSchedule& s, int steps) {
  const int n = inst.n();
  const int m = inst.m();
  Exact out{Vector::Zero(m), Matrix::Zero(m, m)};
  long long paths = 1;
  for (int t = 0; t < steps; ++t) paths *= n;
  for (long long p = 0; p < paths; ++p) {
    Vector x = inst.x1;
    long long code = p;
    for (int t = 1; t <= steps; ++t) {
      const int i = static_cast<int>(code % n);
      code /= n;
      x -= s.eta(t) * (inst.A.row(i).dot(x) - inst.y_delta(i)) * inst.A.row(i).transpose();
    }
    const Vector e = x - inst.x_dag;
    out.mean += e;
    out.second += e * e.transpose();
  }
  out.mean /= static_cast<double>(paths);
  out.second /= static_cast<double>(paths);
  return out;
}

}  // namespace

TEST_CASE("moment states equal enumerated path averages") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 6; ++t) {
    const int n = 2 + t % 3;
    const int m = 2 + (t / 2) % 3;
    const InverseInstance inst = testsupport::raw_instance(testsupport::scaled_gaussian(n, m, 0.4, rng), rng, 0.1);
    const StepSchedule s{0.5 * check_admissible({1.0, 0.0}, inst.A).c0_max, t % 2 ? 0.3 : 0.0};
    const MomentOracle oracle(inst);
    const auto states = oracle.run(init_moments(inst.x1, inst.x_dag), s, 6);
    REQUIRE(states.size() == 6);
    for (int k = 1; k <= 6; ++k) {
      const MomentState& st = states[k - 1];
      CHECK(st.k == k);
      const Exact ex = enumerate_paths(inst, s, k - 1);
      CHECK((st.mu - ex.mean).norm() <= 1e-12 * (1 + ex.mean.norm()));
      CHECK((st.M - ex.second).norm() <= 1e-12 * (1 + ex.second.norm()));
    }
  }
}

TEST_CASE("moment summaries") {
  MomentState s;
  s.mu = Vector::Ones(3);
  s.M = 2.0 * Matrix::Identity(3, 3);
  CHECK(mse(s) == 6.0);
  CHECK(bias_sq(s) == 3.0);
  CHECK(variance(s) == 3.0);
  const MomentState i = init_moments(Vector::Zero(2), Vector::Ones(2));
  CHECK(i.k == 1);
  CHECK(mse(i) == 2.0);
  CHECK(variance(i) == doctest::Approx(0.0));
}

TEST_CASE("second moment stays symmetric and dominates the mean") {
  std::mt19937_64 rng(42);
  const InverseInstance inst = testsupport::raw_instance(testsupport::scaled_gaussian(5, 4, 0.5, rng), rng, 0.2);
  const StepSchedule s{check_admissible({1.0, 0.0}, inst.A).c0_max, 0.0};
  const MomentOracle oracle(inst);
  const auto states = oracle.run(init_moments(inst.x1, inst.x_dag), s, 200);
  for (const auto& st : states) {
    CHECK((st.M - st.M.transpose()).norm() == 0.0);
    const Matrix cov = st.M - st.mu * st.mu.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(cov)};
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * (1 + st.M.norm()));
  }
}

TEST_CASE("mse_at agrees with run") {
  std::mt19937_64 rng(43);
  const InverseInstance inst = testsupport::raw_instance(testsupport::scaled_gaussian(4, 4, 0.5, rng), rng, 0.05);
  const StepSchedule s{check_admissible({1.0, 0.0}, inst.A).c0_max, 0.2};
  const MomentOracle oracle(inst);
  const auto start = init_moments(inst.x1, inst.x_dag);
  const auto states = oracle.run(start, s, 41);
  const auto at = oracle.mse_at(start, s, {0, 1, 7, 40});
  CHECK(at[0] == doctest::Approx(mse(states[0])));
  CHECK(at[1] == doctest::Approx(mse(states[1])));
  CHECK(at[2] == doctest::Approx(mse(states[7])));
  CHECK(at[3] == doctest::Approx(mse(states[40])));
}

TEST_CASE("oracle budget") {
  Matrix A = Matrix::Identity(8, 8) * 0.5;
  MomentBudget b;
  b.max_n = 4;
  CHECK_THROWS_AS(MomentOracle(A, Vector::Zero(8), b), Error);
  MomentBudget kb;
  kb.max_k = 10;
  const MomentOracle o(A, Vector::Zero(8), kb);
  CHECK_THROWS_AS(o.run(init_moments(Vector::Zero(8), Vector::Ones(8)), {0.1, 0.0}, 11), Error);
}

TEST_CASE("monte carlo mean tracks the oracle") {
  std::mt19937_64 rng(44);
  const InverseInstance inst = testsupport::raw_instance(testsupport::scaled_gaussian(4, 3, 0.5, rng), rng, 0.1);
  const StepSchedule s{check_admissible({1.0, 0.0}, inst.A).c0_max, 0.0};
  const std::vector<long long> iters{4, 12, 40};
  const McTrajectory mc = monte_carlo(inst, s, iters, 4000, 100, 2);
  const MomentOracle oracle(inst);
  const auto want = oracle.mse_at(init_moments(inst.x1, inst.x_dag), s, iters);
  for (std::size_t i = 0; i < iters.size(); ++i) {
    CHECK(mc.stderr_mean[i] > 0.0);
    CHECK(std::abs(mc.mean[i] - want[i]) <= 5.0 * mc.stderr_mean[i]);
  }
}
