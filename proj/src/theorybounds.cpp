#include "sgdsat/theorybounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

constexpr double kE = std::numbers::e;

double ipow(double x, int p) {
  double r = 1.0;
  for (int t = 0; t < p; ++t) r *= x;
  return r;
}

double factorial(int i) {
  double f = 1.0;
  for (int t = 2; t <= i; ++t) f *= t;
  return f;
}

// Lemma hypotheses that only involve B and the schedule.
void require_kernel_hypotheses(const SymEigen& eig, const StepSchedule& sched) {
  const double b = eig.norm();
  const double slack = 1.0 + 1e-12;
  std::string bad;
  if (!(sched.c0 > 0.0 && sched.c0 <= slack)) bad += "c0 in (0,1]; ";
  if (!(sched.alpha >= 0.0 && sched.alpha < 1.0)) bad += "alpha in [0,1); ";
  if (sched.c0 * b > slack / (2.0 * kE)) bad += "c0*||B|| <= 1/(2e); ";
  if (b > slack) bad += "||B|| <= 1; ";
  if (!bad.empty()) fail("hypothesis_violation", "stepsize hypotheses not met: " + bad);
}

double lam_pow(double lambda, double s) { return lambda > 0.0 ? std::pow(lambda, s) : 0.0; }

}  // namespace

double phi(double s) {
  if (s < 0.0) return std::pow(2.0, 1.0 - s) / (1.0 - s);
  if (s < 1.0) return 1.0 / (1.0 - s);
  if (s == 1.0) return 2.0;
  return s / (s - 1.0);
}

double pow_or_log(double k, double x) {
  if (x > 0.0) return std::pow(k, x);
  if (x == 0.0) return std::max(std::log(k), 1.0);
  return 1.0;
}

BoundCheck partial_sum_bound_check(double s, long long k) {
  require(k >= 1, "partial_sum_bound_check: k must be >= 1");
  BoundCheck c;
  // Summing from the small terms up keeps the accumulated rounding low.
  for (long long j = k; j >= 1; --j) c.lhs += std::pow(static_cast<double>(j), -s);
  c.rhs = phi(s) * pow_or_log(static_cast<double>(k), 1.0 - s);
  c.ok = within(c.lhs, c.rhs);
  return c;
}

ReindexCheck reindex_identity_check(int k, int i) {
  require(k >= 1 && i >= 0, "reindex_identity_check: need k >= 1, i >= 0");
  ReindexCheck r;
  r.direct = IndexSet(1, k, i + 1).count();
  const IndexSet inner(2, k, i);
  for (std::size_t t = 0; t < inner.count(); ++t) {
    // J_0 has no last element; the inner range then runs over 1..k.
    const int ji = i == 0 ? k + 1 : inner[t][i - 1];
    r.via_inner += static_cast<std::uint64_t>(ji - 1);
  }
  for (int j = 1; j <= k - i; ++j) r.via_outer += IndexSet(j + 1, k, i).count();
  return r;
}

BoundCheck kernel_bound_check(const Matrix& B, const StepSchedule& sched, int k_prime, int k, double s,
                              std::span<const int> J) {
  require(s > 0.0, "kernel_bound_check: s must be > 0");
  require(k_prime >= 1 && k_prime <= k, "kernel_bound_check: need 1 <= k' <= k");
  const int ell = static_cast<int>(J.size());
  require(ell < k + 1 - k_prime, "kernel_bound_check: need l < k + 1 - k'");
  for (std::size_t t = 0; t < J.size(); ++t) {
    require(J[t] >= k_prime && J[t] <= k, "kernel_bound_check: J must lie in [k', k]");
    for (std::size_t u = 0; u < t; ++u) require(J[t] != J[u], "kernel_bound_check: J entries must differ");
  }
  const SpectralProducts sp(B, sched, k);
  require_kernel_hypotheses(sp.eig(), sched);
  BoundCheck c;
  for (int r = 0; r < sp.dim(); ++r) {
    const double v = std::abs(lam_pow(sp.lambda(r), s) * sp.range_product(k_prime, k, J, r));
    c.lhs = std::max(c.lhs, v);
  }
  c.rhs = std::pow(s, s) * std::pow(kE * sched.c0, -s) * std::pow(static_cast<double>(k + 1 - k_prime - ell), -s) *
          std::pow(static_cast<double>(k), sched.alpha * s);
  c.ok = within(c.lhs, c.rhs, 1e-10);
  return c;
}

BoundCheck indexsum_bound_check(int k, int i, double alpha) {
  require(k >= 1 && i >= 1 && i <= k, "indexsum_bound_check: need 1 <= i <= k");
  require(alpha >= 0.0 && alpha < 1.0, "indexsum_bound_check: alpha must lie in [0, 1)");
  const IndexSet set(1, k, i);
  BoundCheck c;
  for (std::size_t t = 0; t < set.count(); ++t) {
    double p = 1.0;
    for (int j : set[t]) p *= std::pow(static_cast<double>(j), -2.0 * alpha);
    c.lhs += p;
  }
  c.rhs = ipow(phi(2.0 * alpha) * pow_or_log(k, 1.0 - 2.0 * alpha), i);
  c.ok = within(c.lhs, c.rhs);
  return c;
}

BoundCheck count_bound_check(int k, int j, int i) {
  require(j >= 0 && j <= k - 1 && i >= 1 && i <= k - j, "count_bound_check: need 0 <= j < k, 1 <= i <= k - j");
  BoundCheck c;
  c.lhs = static_cast<double>(IndexSet(j + 1, k, i).count());
  c.rhs = ipow(static_cast<double>(k - j), i) / factorial(i);
  c.ok = within(c.lhs, c.rhs);
  return c;
}

double BoundContext::kpow(double k) const {
  return std::pow(k, -2.0 * (1.0 - alpha)) * pow_or_log(k, 1.0 - 2.0 * alpha);
}

double BoundContext::h0(double k) const { return 2.0 * (nu + ell) * (nu + ell) * n * phi(2.0 * alpha) * kpow(k); }

double BoundContext::h1(double k) const {
  return 2.0 * (2.0 * ell + 1) * (2.0 * ell + 1) * n * phi(2.0 * alpha) * kpow(k);
}

double BoundContext::h2(double k) const {
  return std::pow(2.0, 2.0 * alpha - 1.0) * (ell + 2.0) * (ell + 2.0) * n * c0 * std::pow(k, -alpha);
}

double BoundContext::c_apx(double k) const {
  if (ell == 0) return std::pow(2.0, 1.0 - 2.0 * nu) * std::pow(nu, 2.0 * nu);
  const double lead = std::pow(nu + ell, 2.0 * nu);
  if (h0(k) <= 0.5) return 4.0 * lead;
  double s = 0.0;
  const double h = h0(2.0 * ell);
  for (int i = 0; i <= ell; ++i) s += ipow(h, i);
  return 2.0 * lead * s;
}

double BoundContext::c_ppg(double k) const {
  const double pa = phi(alpha);
  if (h1(k) <= 0.5 && h2(k) <= 0.5) return (16.0 * (ell + 1) * c0 + 203.0) * pa * pa;
  if (ell == 0) return 2.0 * c0 * (n * (phi(2.0 * alpha) + 3.0 * pa) + 11.0 * pa * pa);
  double s1 = 0.0;
  double s2 = 0.0;
  const double a1 = h1(4.0 * ell);
  const double a2 = h2(4.0 * ell);
  for (int i = 0; i <= ell + 1; ++i) {
    s1 += ipow(a1, i);
    s2 += ipow(a2, i);
  }
  return (8.0 * (ell + 1) * c0 * s1 + 103.0 * s2) * pa * pa;
}

double BoundContext::c_star0() const {
  return 2.0 * std::pow(2.0 * nu / (kE * c0), 2.0 * nu) +
         6.0 * n * c0 * std::pow(2.0 * (2.0 * nu + 1.0) / (kE * c0), 2.0 * nu + 1.0);
}

double BoundContext::c_dstar0() const { return 3.0 + 6.0 * n * c0; }

double apx_bound(const BoundContext& ctx, double k) {
  require(ctx.nu > 0.5, "apx_bound: nu must exceed 1/2");
  require(ctx.c0 > 0.0, "apx_bound: c0 must be > 0");
  require(ctx.alpha >= 0.0 && ctx.alpha < 1.0, "apx_bound: alpha must lie in [0, 1)");
  if (ctx.ell > 0) {
    if (ctx.ell < ctx.nu) fail("hypothesis_violation", "apx_bound: needs l >= nu");
    if (k < 2.0 * ctx.ell) fail("hypothesis_violation", "apx_bound: needs k >= 2l");
  }
  require(k >= 1.0, "apx_bound: k must be >= 1");
  return ctx.c_apx(k) * std::pow(ctx.c0, -2.0 * ctx.nu) * std::pow(k, -2.0 * ctx.nu * (1.0 - ctx.alpha)) *
         ctx.w_norm * ctx.w_norm;
}

double ppg_bound(const BoundContext& ctx, double k) {
  require(ctx.c0 > 0.0, "ppg_bound: c0 must be > 0");
  require(ctx.alpha >= 0.0 && ctx.alpha < 1.0, "ppg_bound: alpha must lie in [0, 1)");
  require(k >= 1.0, "ppg_bound: k must be >= 1");
  if (k < 4.0 * ctx.ell) fail("hypothesis_violation", "ppg_bound: needs k >= 4l");
  return ctx.c_ppg(k) * ctx.delta_bar * ctx.delta_bar * std::pow(k, 1.0 - ctx.alpha);
}

double rate_bound_al0(const BoundContext& ctx, double k) {
  if (ctx.alpha != 0.0) fail("invalid_argument", "rate_bound_al0: requires alpha = 0");
  require(ctx.nu > 0.5, "rate_bound_al0: nu must exceed 1/2");
  require(ctx.c0 > 0.0 && k >= 1.0, "rate_bound_al0: need c0 > 0 and k >= 1");
  return ctx.c_star0() * std::pow(k, -2.0 * ctx.nu) * ctx.w_norm * ctx.w_norm +
         ctx.c_dstar0() * ctx.delta_bar * ctx.delta_bar * k;
}

bool condition41_check(const BoundContext& ctx, double epsilon) {
  if (ctx.alpha != 0.0) fail("invalid_argument", "condition41_check: requires alpha = 0");
  require(epsilon > 0.5 && epsilon < 1.0, "condition41_check: epsilon must lie in (1/2, 1)");
  return 2.0 * (1.0 + phi(2.0 * epsilon)) * ctx.n * std::pow(ctx.c0, 2.0 - 2.0 * epsilon) <= 1.0;
}

double condition41_c0_max(double n, double epsilon) {
  require(epsilon > 0.5 && epsilon < 1.0, "condition41_c0_max: epsilon must lie in (1/2, 1)");
  return std::pow(1.0 / (2.0 * (1.0 + phi(2.0 * epsilon)) * n), 1.0 / (2.0 - 2.0 * epsilon));
}

PpgSums enumerate_ppg_sums(const SpectralProducts& sp, int i, int k) {
  require(i >= 0 && k >= 1, "enumerate_ppg_sums: need i >= 0, k >= 1");
  const int d = sp.dim();
  const double power = i + 0.5;
  PpgSums out;
  const IndexSet sets(2, k, i);
  std::vector<double> pw(d);
  for (int r = 0; r < d; ++r) pw[r] = lam_pow(sp.lambda(r), power);
  std::vector<double> lin(d);
  for (std::size_t t = 0; t < sets.count(); ++t) {
    const std::span<const int> J = sets[t];
    double weight = 1.0;
    for (int j : J) weight *= sp.eta(j) * sp.eta(j);
    // With i = 0 the inner index runs over 1..k, as if j_0 = k + 1.
    const int top = i == 0 ? k + 1 : J[i - 1];
    std::fill(lin.begin(), lin.end(), 0.0);
    double quad = 0.0;
    std::vector<double> prod(d);
    for (int r = 0; r < d; ++r) prod[r] = sp.range_product(top, k, J, r);
    // Walk j' downward; prod holds the product over [j'+1, k] minus J.
    for (int jp = top - 1; jp >= 1; --jp) {
      double nmax = 0.0;
      for (int r = 0; r < d; ++r) {
        lin[r] += sp.eta(jp) * prod[r];
        nmax = std::max(nmax, std::abs(prod[r] * pw[r]));
        prod[r] *= sp.factor(jp, r);
      }
      quad += sp.eta(jp) * sp.eta(jp) * nmax * nmax;
    }
    double lin_max = 0.0;
    for (int r = 0; r < d; ++r) lin_max = std::max(lin_max, std::abs(lin[r] * pw[r]));
    out.I += weight * lin_max * lin_max;
    out.II += weight * quad;
  }
  return out;
}

PpgSums ppg_sums_check(int i, int k, const StepSchedule& sched, const Matrix& B) {
  require(i >= 0 && k >= 1, "ppg_sums_check: need i >= 0, k >= 1");
  if (k < 4 * i) fail("hypothesis_violation", "ppg_sums_check: needs k >= 4i");
  const SpectralProducts sp(B, sched, k);
  require_kernel_hypotheses(sp.eig(), sched);
  PpgSums out = enumerate_ppg_sums(sp, i, k);

  const double a = sched.alpha;
  const double c0 = sched.c0;
  const double kk = static_cast<double>(k);
  const double K = std::pow(kk, -2.0 * (1.0 - a)) * pow_or_log(kk, 1.0 - 2.0 * a);
  const double pa = phi(a);
  const double p2a = phi(2.0 * a);
  const double two_a = std::pow(2.0, 2.0 * a - 1.0);
  const double ti = 2.0 * i + 1.0;
  out.I_bound = 2.0 *
                (two_a / kE * ti * c0 * ipow((2.0 / kE) * (2.0 / kE) * ti * ti * p2a * K, i) +
                 25.0 * std::pow(c0, std::max(i, 1)) * ipow(two_a / kE * (i + 2.0) * (i + 2.0) * std::pow(kk, -a), i)) *
                pa * pa * std::pow(kk, 1.0 - a);
  out.II_bound = (kE * c0 / (2.0 * ti) * ipow(4.0 / (kE * kE) * ti * ti * p2a * K, i + 1) +
                  3.0 * pa * ipow(two_a / kE * c0 * (i + 1.0) * (i + 1.0) * std::pow(kk, -a), i + 1)) *
                 std::pow(kk, 1.0 - a);
  return out;
}

WitnessResult assumption3_violation_witness(const Matrix& A) {
  require(A.rows() > 0 && A.cols() > 0, "witness: empty matrix");
  WitnessResult out;
  out.rows_orthogonal = rows_orthogonal(A);
  if (out.rows_orthogonal) {
    out.note = "rows pairwise orthogonal";
    return out;
  }
  const Svd s = svd(A, SvdMode::full);
  const double smax = s.sigma.size() ? s.sigma(0) : 0.0;
  const double tol = smax * 1e-12 * std::max(A.rows(), A.cols());
  int rank = 0;
  while (rank < s.sigma.size() && s.sigma(rank) > tol) ++rank;

  for (int j = 0; j < rank; ++j) {
    int support = 0;
    for (Eigen::Index i = 0; i < s.U.rows(); ++i) support += std::abs(s.U(i, j)) > 1e-8;
    if (support < 2) continue;
    // e = v_l with l != j has v_j^t e = 0 by orthonormality, and Ae = sigma_l u_l.
    for (int l = 0; l < rank; ++l) {
      if (l == j) continue;
      const double lhs = s.sigma(l) * s.sigma(l) * (s.U.col(j).cwiseProduct(s.U.col(l))).squaredNorm();
      if (!out.witness || lhs > out.witness->lhs) {
        ViolationWitness w;
        w.j = j;
        w.l = l;
        w.e = s.V.col(l);
        w.lhs = lhs;
        w.rhs = 0.0;
        const double proj = s.sigma(j) * s.V.col(j).dot(w.e);
        w.rhs_direct = proj * proj;
        out.witness = std::move(w);
      }
    }
  }
  if (out.witness && !(out.witness->lhs > 1e-16 * smax * smax * out.witness->e.squaredNorm())) {
    out.witness.reset();
  }
  if (!out.witness) out.note = "rows not orthogonal, but no vector in the row space separates the two sides";
  return out;
}

}  // namespace sgdsat
