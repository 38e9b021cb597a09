#include <cmath>
#include <string>

#include "sgdsat/error.hpp"
#include "sgdsat/theorybounds.hpp"

namespace sgdsat {

namespace {

constexpr int kMaxK = 12;
constexpr int kMaxEll = 3;
constexpr int kMaxN = 6;

double lam_pow(double lambda, double p) {
  if (p == 0.0) return 1.0;
  return lambda <= 0.0 ? 0.0 : std::pow(lambda, p);
}

}  // namespace

DecompositionReport decomposition_terms(const InverseInstance& inst, const StepSchedule& sched, int k, int ell,
                                        const std::vector<MomentState>& states, bool allow_general) {
  require(ell >= 0 && ell < k, "decomposition_terms: need 0 <= ell < k");
  if (k > kMaxK || ell > kMaxEll || inst.n() > kMaxN) {
    fail("budget_exceeded", "decomposition_terms: caps are k <= 12, ell <= 3, n <= 6 (got k = " +
                                std::to_string(k) + ", ell = " + std::to_string(ell) +
                                ", n = " + std::to_string(inst.n()) + ")");
  }
  if (!allow_general && !rows_orthogonal(inst.A)) {
    fail("hypothesis_violation", "decomposition_terms: rows of A are not pairwise orthogonal");
  }

  std::vector<MomentState> computed;
  const std::vector<MomentState>* traj = &states;
  if (states.empty()) {
    const MomentOracle oracle(inst);
    computed = oracle.run(init_moments(inst.x1, inst.x_dag), sched, k + 1);
    traj = &computed;
  }
  require(static_cast<int>(traj->size()) >= k + 1, "decomposition_terms: need states for iterations 1..k+1");
  for (int j = 1; j <= k + 1; ++j) {
    require((*traj)[j - 1].k == j, "decomposition_terms: states[j-1] must be iteration j");
  }

  const Matrix B = normal_operator(inst.A);
  const SpectralProducts sp(B, sched, k);
  const Matrix& Q = sp.eig().Q;
  const int d = sp.dim();
  const double n = static_cast<double>(inst.n());
  const double dbar2 = inst.delta_bar() * inst.delta_bar();
  const Vector e_hat = Q.transpose() * (inst.x1 - inst.x_dag);

  DecompositionReport rep;
  rep.k = k;
  rep.ell = ell;
  rep.terms_apx.assign(ell + 1, 0.0);
  rep.terms_ppg.assign(ell + 1, 0.0);

  for (int i = 0; i <= ell; ++i) {
    const double pre = std::pow(2.0, i + 1) * std::pow(n - 1.0, i);

    double apx = 0.0;
    const IndexSet sets(1, k, i);
    for (std::size_t t = 0; t < sets.count(); ++t) {
      const auto J = sets[t];
      double weight = 1.0;
      for (int j : J) weight *= sp.eta(j) * sp.eta(j);
      double s = 0.0;
      for (int r = 0; r < d; ++r) {
        const double v = sp.range_product(1, k, J, r) * lam_pow(sp.lambda(r), i) * e_hat(r);
        s += v * v;
      }
      apx += weight * s;
    }
    rep.terms_apx[i] = pre * apx;

    const PpgSums sums = enumerate_ppg_sums(sp, i, k);
    rep.terms_ppg[i] = pre * dbar2 * (sums.I + (n - 1.0) * sums.II);
  }

  // Remainder over J_{[1,k],l+1}, weighted by the diagonal of Q^t M_j Q.
  std::vector<Vector> diag_cache(k + 1);
  const IndexSet tail_sets(1, k, ell + 1);
  double tail = 0.0;
  for (std::size_t t = 0; t < tail_sets.count(); ++t) {
    const auto J = tail_sets[t];
    const int last = J[ell];
    double weight = 1.0;
    for (int j : J) weight *= sp.eta(j) * sp.eta(j);
    if (diag_cache[last].size() == 0) {
      diag_cache[last] = (Q.transpose() * (*traj)[last - 1].M * Q).diagonal();
    }
    const Vector& D = diag_cache[last];
    double s = 0.0;
    for (int r = 0; r < d; ++r) {
      const double c = sp.range_product(last + 1, k, J.first(ell), r) * lam_pow(sp.lambda(r), ell + 1);
      s += c * c * D(r);
    }
    tail += weight * s;
  }
  rep.tail = std::pow(2.0, ell + 1) * std::pow(n - 1.0, ell + 1) * tail;

  rep.rhs_total = rep.tail;
  for (int i = 0; i <= ell; ++i) rep.rhs_total += rep.terms_apx[i] + rep.terms_ppg[i];
  rep.lhs_exact = mse((*traj)[k]);
  rep.slack = rep.rhs_total - rep.lhs_exact;
  return rep;
}

}  // namespace sgdsat
