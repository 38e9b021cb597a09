#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgdsat/index_sets.hpp"
#include "sgdsat/instances.hpp"
#include "sgdsat/moments.hpp"
#include "sgdsat/numerics.hpp"
#include "sgdsat/solvers.hpp"

namespace sgdsat {

/// Constant in sum_{j<=k} j^{-s} <= phi(s) k^{max(1-s,0)}:
/// 2^{1-s}/(1-s) for s < 0, 1/(1-s) on [0,1), 2 at s = 1, s/(s-1) for s > 1.
double phi(double s);

/// k^x for x > 0, max(ln k, 1) for x == 0 and 1 for x < 0. This is the power
/// k^{max(x,0)} with the logarithmic reading of the borderline exponent.
double pow_or_log(double k, double x);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
  double slack() const { return rhs - lhs; }
};

/// Relative tolerance used for every inequality audit.
inline constexpr double kAuditTolerance = 1e-9;

inline bool within(double lhs, double rhs, double rel = kAuditTolerance) {
  return lhs <= rhs + rel * std::max(std::abs(rhs), std::abs(lhs));
}

BoundCheck partial_sum_bound_check(double s, long long k);

/// The three counts in the sum-reindexing identity over J_{[1,k],i+1}.
struct ReindexCheck {
  std::uint64_t direct = 0;
  std::uint64_t via_inner = 0;  // sum over J_i in J_{[2,k],i} of (j_i - 1)
  std::uint64_t via_outer = 0;  // sum over j = 1..k-i of |J_{[j+1,k],i}|
  bool ok() const { return direct == via_inner && direct == via_outer; }
};
ReindexCheck reindex_identity_check(int k, int i);

/// ||Pi_{[k',k] \ J}(B) B^s|| against s^s (e c0)^{-s} (k+1-k'-l)^{-s} k^{alpha s}.
/// Rejects schedules violating c0 <= 1, c0 ||B|| <= 1/(2e) or ||B|| <= 1.
BoundCheck kernel_bound_check(const Matrix& B, const StepSchedule& sched, int k_prime, int k, double s,
                              std::span<const int> J);

/// sum over J_{[1,k],i} of prod j_t^{-2 alpha} against phi(2 alpha)^i (k^{max(1-2alpha,0)})^i.
BoundCheck indexsum_bound_check(int k, int i, double alpha);
/// |J_{[j+1,k],i}| against (k-j)^i / i!.
BoundCheck count_bound_check(int k, int j, int i);

struct BoundContext {
  double nu = 1.0;
  int ell = 0;
  double alpha = 0.0;
  double n = 1.0;
  double c0 = 0.0;
  double w_norm = 0.0;
  double delta_bar = 0.0;

  double kpow(double k) const;  // k^{-2(1-alpha)} (k^{max(1-2alpha,0)})
  double h0(double k) const;
  double h1(double k) const;
  double h2(double k) const;
  double c_apx(double k) const;  // c_{nu,l,alpha,n}
  double c_ppg(double k) const;  // c_{l,alpha,n,c0}
  double c_star0() const;
  double c_dstar0() const;
};

/// Bound on sum_{i<=l} I_{i,1}; for l = 0 the single-term bound
/// 2^{1-2nu} nu^{2nu} c0^{-2nu} k^{-2nu(1-alpha)} ||w||^2.
double apx_bound(const BoundContext& ctx, double k);

/// Bound on sum_{i<=l} I_{i,2}. The branch with h1, h2 > 1/2 at l = 0 uses
/// 2 c0 (n (phi(2alpha) + 3 phi(alpha)) + 11 phi(alpha)^2) dbar^2 k^{1-alpha}.
double ppg_bound(const BoundContext& ctx, double k);

/// c*^0 k^{-2nu} ||w||^2 + c**^0 dbar^2 k, alpha = 0 only.
double rate_bound_al0(const BoundContext& ctx, double k);
/// 2 (1 + phi(2 eps)) n c0^{2 - 2 eps} <= 1 with eps in (1/2, 1).
bool condition41_check(const BoundContext& ctx, double epsilon);
/// Largest c0 meeting the condition above.
double condition41_c0_max(double n, double epsilon);

struct PpgSums {
  double I = 0.0;
  double I_bound = 0.0;
  double II = 0.0;
  double II_bound = 0.0;
  bool ok() const { return within(I, I_bound) && within(II, II_bound); }
};

/// I(i,k) = sum_{J_i in J_{[2,k],i}} prod eta_{j_t}^2 ||sum_{j'<j_i} eta_j' Pi_{[j'+1,k] \ J_i}(B) B^{i+1/2}||^2
/// and II(i,k), the same with sum_{j'} eta_j'^2 ||...||^2 inside. Bounds left at 0.
PpgSums enumerate_ppg_sums(const SpectralProducts& sp, int i, int k);

/// Enumerated I(i,k), II(i,k) and their closed-form bounds (k >= 4i).
PpgSums ppg_sums_check(int i, int k, const StepSchedule& sched, const Matrix& B);

struct DecompositionReport {
  int k = 0;
  int ell = 0;
  std::vector<double> terms_apx;  // I_{i,1}, i = 0..l
  std::vector<double> terms_ppg;  // I_{i,2}
  double tail = 0.0;
  double rhs_total = 0.0;
  double lhs_exact = 0.0;
  double slack = 0.0;
  bool ok() const { return within(lhs_exact, rhs_total); }
};

/// Terms of the refined error decomposition of E||e_{k+1}||^2 for 0 <= l < k.
/// `states` holds moment states for iterations 1..k+1 (states[j-1].k == j);
/// an empty vector makes the function compute them. Requires pairwise
/// orthogonal rows unless `allow_general` is set; caps k <= 12, l <= 3, n <= 6.
DecompositionReport decomposition_terms(const InverseInstance& inst, const StepSchedule& sched, int k, int ell,
                                        const std::vector<MomentState>& states = {},
                                        bool allow_general = false);

struct ViolationWitness {
  int j = -1;     // singular index with a non-canonical left vector
  int l = -1;     // e = v_l
  Vector e;
  double lhs = 0.0;         // sum_i (u_{ji} (Ae)_i)^2
  double rhs = 0.0;         // (sigma_j v_j^t e)^2 from the coordinates of e
  double rhs_direct = 0.0;  // same quantity from the floating-point v_j^t e
};

struct WitnessResult {
  bool rows_orthogonal = false;
  std::optional<ViolationWitness> witness;  // empty means "none"
  std::string note;
};

WitnessResult assumption3_violation_witness(const Matrix& A);

}  // namespace sgdsat
