#include "sgdsat/audits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sgdsat/error.hpp"
#include "sgdsat/index_sets.hpp"
#include "sgdsat/instances.hpp"
#include "sgdsat/moments.hpp"
#include "sgdsat/parallel.hpp"
#include "sgdsat/testproblems.hpp"
#include "sgdsat/theorybounds.hpp"

namespace sgdsat {

using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
  json config;
};

double relative_slack(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : (rhs - lhs) / scale;
}

void fold(AuditSection& sec, const std::vector<std::vector<Outcome>>& chunks, std::size_t keep) {
  for (const auto& chunk : chunks) {
    for (const auto& o : chunk) sec.record(o.pass, o.lhs, o.rhs, o.config, keep);
  }
}

// Runs each task (which may yield several checks) and folds in task order.
template <class Fn>
AuditSection run_tasks(const std::string& name, std::size_t count, const AuditOptions& opts, Fn&& fn) {
  AuditSection sec;
  sec.name = name;
  auto chunks = parallel_map<std::vector<Outcome>>(count, opts.threads, [&](std::size_t t) {
    try {
      return fn(t);
    } catch (const Error& e) {
      Outcome o;
      o.pass = false;
      o.lhs = std::numeric_limits<double>::quiet_NaN();
      o.rhs = std::numeric_limits<double>::quiet_NaN();
      o.config = {{"task", t}, {"error", e.code()}, {"message", e.what()}};
      return std::vector<Outcome>{o};
    }
  });
  fold(sec, chunks, opts.max_failures_kept);
  return sec;
}

Outcome from_check(const BoundCheck& c, json config) {
  return {c.ok && std::isfinite(c.lhs), c.lhs, c.rhs, std::move(config)};
}

Outcome from_pair(double lhs, double rhs, json config, double rel = kAuditTolerance) {
  return {std::isfinite(lhs) && std::isfinite(rhs) && within(lhs, rhs, rel), lhs, rhs, std::move(config)};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Vector random_unit(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = g(rng);
  return v / v.norm();
}

// Stepsize c0 = u * c0_max with u in [lo, 1].
StepSchedule random_schedule(const Matrix& A, double alpha, std::mt19937_64& rng, double lo = 0.1) {
  const StepsizeReport rep = admissible_c0(A, alpha);
  return {uniform(rng, lo, 1.0) * rep.c0_max, alpha};
}

// Row-orthogonal instance with x_dag - x1 = B^nu w: the setting shared by the
// decomposition and proposition audits.
struct SmallCase {
  InverseInstance inst;
  StepSchedule sched;
  json config;
};

SmallCase make_small_case(std::uint64_t seed, int n, double nu, double eps, double alpha) {
  std::mt19937_64 rng(seed);
  SmallCase c;
  const Matrix A = random_row_orthogonal(n, rng);
  const Vector w = random_unit(n, rng);
  c.inst = make_source_instance(A, nu, w, eps, seed ^ 0x9e3779b97f4a7c15ULL);
  c.sched = random_schedule(A, alpha, rng);
  c.config = {{"seed", seed}, {"n", n}, {"nu", nu}, {"eps", eps}, {"alpha", alpha}, {"c0", c.sched.c0}};
  return c;
}

std::uint64_t task_seed(const AuditOptions& opts, std::uint64_t salt, std::size_t t) {
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(t)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

void AuditSection::record(bool pass, double lhs, double rhs, const json& config, std::size_t keep) {
  ++total;
  if (pass) ++passed;
  const double s = std::isfinite(lhs) && std::isfinite(rhs) ? relative_slack(lhs, rhs) : -1.0;
  worst_slack = std::min(worst_slack, s);
  if (!pass && failures.size() < keep) {
    json f = config;
    f["lhs"] = lhs;
    f["rhs"] = rhs;
    failures.push_back(std::move(f));
  }
}

bool AuditReport::all_pass() const {
  return std::all_of(sections.begin(), sections.end(), [](const AuditSection& s) { return s.ok(); });
}

json AuditReport::to_json() const {
  json out;
  out["suite"] = suite;
  out["all_pass"] = all_pass();
  json secs = json::array();
  for (const auto& s : sections) {
    secs.push_back({{"name", s.name},
                    {"passed", s.passed},
                    {"total", s.total},
                    {"worst_slack", s.worst_slack},
                    {"failures", s.failures}});
  }
  out["sections"] = std::move(secs);
  return out;
}

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

Matrix random_row_orthogonal(int n, std::mt19937_64& rng, double lo, double hi) {
  std::vector<double> sig(n);
  for (auto& s : sig) s = uniform(rng, lo, hi);
  std::sort(sig.begin(), sig.end(), std::greater<>());
  const Matrix V = random_orthogonal(n, rng);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i) A.row(i) = sig[i] * V.col(i).transpose();
  return A;
}

Matrix random_general(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix A(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(rng);
  return A;
}

AuditSection audit_partial_sums(const AuditOptions& opts) {
  const std::vector<double> grid{-2.0, -0.5, 0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0};
  return run_tasks("partial_sums", grid.size(), opts, [&](std::size_t t) {
    const double s = grid[t];
    std::vector<Outcome> out;
    // Running sum in increasing j; the single-k routine is spot-checked at the end.
    double sum = 0.0;
    for (long long k = 1; k <= 10'000; ++k) {
      sum += std::pow(static_cast<double>(k), -s);
      const double rhs = phi(s) * pow_or_log(static_cast<double>(k), 1.0 - s);
      out.push_back(from_pair(sum, rhs, {{"s", s}, {"k", k}}));
    }
    out.push_back(from_check(partial_sum_bound_check(s, 10'000), {{"s", s}, {"k", 10'000}, {"direct", true}}));
    return out;
  });
}

AuditSection audit_reindex(const AuditOptions& opts) {
  const int kmax = opts.max_k;
  return run_tasks("reindex_identity", static_cast<std::size_t>(kmax), opts, [&](std::size_t t) {
    const int k = static_cast<int>(t) + 1;
    std::vector<Outcome> out;
    for (int i = 0; i <= 4 && i + 1 <= k; ++i) {
      const ReindexCheck c = reindex_identity_check(k, i);
      const double d = static_cast<double>(c.direct);
      out.push_back({c.ok(), d, d,
                     {{"k", k}, {"i", i}, {"direct", c.direct}, {"via_inner", c.via_inner},
                      {"via_outer", c.via_outer}}});
    }
    return out;
  });
}

AuditSection audit_kernel(const AuditOptions& opts) {
  return run_tasks("kernel_bound", static_cast<std::size_t>(opts.kernel_configs), opts, [&](std::size_t t) {
    const std::uint64_t seed = task_seed(opts, 23, t);
    std::mt19937_64 rng(seed);
    const int m = uniform_int(rng, 1, 10);
    const int n = uniform_int(rng, 1, 10);
    Matrix A = random_general(n, m, rng);
    const double rmax = row_norms_squared(A).maxCoeff();
    A /= std::sqrt(rmax) / uniform(rng, 0.2, 1.0);
    const Matrix B = normal_operator(A);
    const double alpha = uniform_int(rng, 0, 1) ? 0.0 : uniform(rng, 0.0, 0.9);
    const StepSchedule sched = random_schedule(A, alpha, rng, 0.01);
    const int k = uniform_int(rng, 1, 30);
    const int kp = uniform_int(rng, 1, k);
    const int ell = uniform_int(rng, 0, k - kp);
    std::vector<int> pool(k - kp + 1);
    std::iota(pool.begin(), pool.end(), kp);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> J(pool.begin(), pool.begin() + ell);
    std::sort(J.begin(), J.end(), std::greater<>());
    const double s = uniform(rng, 1e-3, 4.0);
    const json cfg = {{"seed", seed}, {"n", n}, {"m", m}, {"k", k}, {"k_prime", kp}, {"J", J},
                      {"s", s}, {"c0", sched.c0}, {"alpha", alpha}};
    return std::vector<Outcome>{from_check(kernel_bound_check(B, sched, kp, k, s, J), cfg)};
  });
}

AuditSection audit_indexsum(const AuditOptions& opts) {
  const std::vector<double> alphas{0.0, 0.1, 0.3, 0.5, 0.9};
  return run_tasks("indexsum_bound", alphas.size(), opts, [&](std::size_t t) {
    std::vector<Outcome> out;
    for (int k = 1; k <= opts.max_k; ++k)
      for (int i = 1; i <= std::min(4, k); ++i)
        out.push_back(from_check(indexsum_bound_check(k, i, alphas[t]), {{"k", k}, {"i", i}, {"alpha", alphas[t]}}));
    return out;
  });
}

AuditSection audit_count(const AuditOptions& opts) {
  return run_tasks("count_bound", static_cast<std::size_t>(opts.max_k), opts, [&](std::size_t t) {
    const int k = static_cast<int>(t) + 1;
    std::vector<Outcome> out;
    for (int j = 0; j < k; ++j)
      for (int i = 1; i <= std::min(4, k - j); ++i) out.push_back(from_check(count_bound_check(k, j, i), {{"k", k}, {"j", j}, {"i", i}}));
    return out;
  });
}

AuditSection audit_ppg_sums(const AuditOptions& opts) {
  const std::vector<double> alphas{0.0, 0.3};
  const int per_alpha = 8;
  return run_tasks("ppg_sums", alphas.size() * per_alpha, opts, [&](std::size_t t) {
    const double alpha = alphas[t / per_alpha];
    const std::uint64_t seed = task_seed(opts, 37, t);
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, 1, 6);
    const int m = uniform_int(rng, 1, 6);
    Matrix A = random_general(n, m, rng);
    A /= std::sqrt(row_norms_squared(A).maxCoeff());
    const StepSchedule sched = random_schedule(A, alpha, rng, 0.05);
    const Matrix B = normal_operator(A);
    std::vector<Outcome> out;
    for (int i = 0; i <= 2; ++i) {
      for (int k = std::max(1, 4 * i); k <= opts.max_k; ++k) {
        const PpgSums p = ppg_sums_check(i, k, sched, B);
        const json cfg = {{"seed", seed}, {"n", n}, {"m", m}, {"i", i}, {"k", k}, {"c0", sched.c0}, {"alpha", alpha}};
        json c1 = cfg;
        c1["sum"] = "I";
        json c2 = cfg;
        c2["sum"] = "II";
        out.push_back(from_pair(p.I, p.I_bound, c1));
        out.push_back(from_pair(p.II, p.II_bound, c2));
      }
    }
    return out;
  });
}

AuditSection audit_decomposition(const AuditOptions& opts) {
  return run_tasks("decomposition", static_cast<std::size_t>(opts.decomposition_configs), opts, [&](std::size_t t) {
    const std::uint64_t seed = task_seed(opts, 41, t);
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, 3, 6);
    const double nu = std::vector<double>{0.25, 0.5, 1.0, 2.0}[uniform_int(rng, 0, 3)];
    const double eps = uniform_int(rng, 0, 1) ? 0.0 : 1e-2;
    const double alpha = std::vector<double>{0.0, 0.0, 0.3, 0.6}[uniform_int(rng, 0, 3)];
    const int k = uniform_int(rng, 1, std::min(opts.max_k, 12));
    const int ell = uniform_int(rng, 0, std::min(2, k - 1));
    SmallCase c = make_small_case(seed, n, nu, eps, alpha);
    const MomentOracle oracle(c.inst);
    const auto states = oracle.run(init_moments(c.inst.x1, c.inst.x_dag), c.sched, k + 1);
    std::vector<Outcome> out;
    // Both l and l + 1 must dominate the exact value.
    for (int l = ell; l <= std::min(ell + 1, k - 1); ++l) {
      const DecompositionReport rep = decomposition_terms(c.inst, c.sched, k, l, states);
      json cfg = c.config;
      cfg["k"] = k;
      cfg["ell"] = l;
      out.push_back(from_pair(rep.lhs_exact, rep.rhs_total, cfg));
    }
    return out;
  });
}

AuditSection audit_apx_bound(const AuditOptions& opts) {
  struct Cell {
    double nu;
    int ell;
  };
  const std::vector<Cell> cells{{0.75, 0}, {1.0, 0}, {2.0, 0}, {0.75, 1}, {1.0, 1}, {1.0, 2}, {2.0, 2}, {2.0, 3}};
  const int reps = 6;
  return run_tasks("apx_bound", cells.size() * reps, opts, [&](std::size_t t) {
    const Cell cell = cells[t / reps];
    const std::uint64_t seed = task_seed(opts, 43, t);
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, 2, 6);
    const double alpha = uniform_int(rng, 0, 1) ? 0.0 : 0.3;
    SmallCase c = make_small_case(seed, n, cell.nu, 0.0, alpha);
    const int kmax = std::min(opts.max_k, 12);
    const MomentOracle oracle(c.inst);
    const auto states = oracle.run(init_moments(c.inst.x1, c.inst.x_dag), c.sched, kmax + 1);
    BoundContext ctx;
    ctx.nu = cell.nu;
    ctx.ell = cell.ell;
    ctx.alpha = alpha;
    ctx.n = n;
    ctx.c0 = c.sched.c0;
    ctx.w_norm = c.inst.w_norm;
    std::vector<Outcome> out;
    for (int k = std::max({1, 2 * cell.ell, cell.ell + 1}); k <= kmax; ++k) {
      const DecompositionReport rep = decomposition_terms(c.inst, c.sched, k, cell.ell, states);
      const double lhs = std::accumulate(rep.terms_apx.begin(), rep.terms_apx.end(), 0.0);
      json cfg = c.config;
      cfg["k"] = k;
      cfg["ell"] = cell.ell;
      out.push_back(from_pair(lhs, apx_bound(ctx, k), cfg));
    }
    return out;
  });
}

AuditSection audit_ppg_bound(const AuditOptions& opts) {
  const std::vector<int> ells{0, 1, 2, 3};
  const int reps = 6;
  return run_tasks("ppg_bound", ells.size() * reps, opts, [&](std::size_t t) {
    const int ell = ells[t / reps];
    const std::uint64_t seed = task_seed(opts, 47, t);
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, 2, 6);
    const double alpha = uniform_int(rng, 0, 1) ? 0.0 : 0.3;
    SmallCase c = make_small_case(seed, n, 1.0, 1e-2, alpha);
    const int kmax = std::min(opts.max_k, 12);
    const MomentOracle oracle(c.inst);
    const auto states = oracle.run(init_moments(c.inst.x1, c.inst.x_dag), c.sched, kmax + 1);
    BoundContext ctx;
    ctx.ell = ell;
    ctx.alpha = alpha;
    ctx.n = n;
    ctx.c0 = c.sched.c0;
    ctx.delta_bar = c.inst.delta_bar();
    std::vector<Outcome> out;
    for (int k = std::max({1, 4 * ell, ell + 1}); k <= kmax; ++k) {
      const DecompositionReport rep = decomposition_terms(c.inst, c.sched, k, ell, states);
      const double lhs = std::accumulate(rep.terms_ppg.begin(), rep.terms_ppg.end(), 0.0);
      json cfg = c.config;
      cfg["k"] = k;
      cfg["ell"] = ell;
      out.push_back(from_pair(lhs, ppg_bound(ctx, k), cfg));
    }
    return out;
  });
}

AuditSection audit_rate_bound(const AuditOptions& opts) {
  const std::vector<double> nus{0.75, 1.0, 2.0};
  const std::vector<double> epss{0.0, 1e-2};
  const int reps = 3;
  const int n = 6;
  const double epsilon = 0.75;
  return run_tasks("rate", nus.size() * epss.size() * reps, opts, [&](std::size_t t) {
    const double nu = nus[t / (epss.size() * reps)];
    const double eps = epss[(t / reps) % epss.size()];
    const std::uint64_t seed = task_seed(opts, 53, t);
    std::mt19937_64 rng(seed);
    const Matrix A = random_row_orthogonal(n, rng);
    const Vector w = random_unit(n, rng);
    const InverseInstance inst = make_source_instance(A, nu, w, eps, seed ^ 0x5851f42d4c957f2dULL);
    const double c0 = std::min(condition41_c0_max(n, epsilon), admissible_c0(A).c0_max);
    const StepSchedule sched{c0, 0.0};
    BoundContext ctx;
    ctx.nu = nu;
    ctx.n = n;
    ctx.c0 = c0;
    ctx.w_norm = inst.w_norm;
    ctx.delta_bar = inst.delta_bar();
    const json base = {{"seed", seed}, {"nu", nu}, {"eps", eps}, {"c0", c0}};
    std::vector<Outcome> out;
    json hyp = base;
    hyp["hypotheses"] = true;
    out.push_back({condition41_check(ctx, epsilon) && check_admissible(sched, A).ok, 0.0, 0.0, hyp});
    const MomentOracle oracle(inst);
    MomentState s = init_moments(inst.x1, inst.x_dag);
    for (int k = 1; k <= opts.rate_max_k; ++k) {
      json cfg = base;
      cfg["k"] = k;
      out.push_back(from_pair(mse(s), rate_bound_al0(ctx, k), cfg));
      oracle.step(s, sched.eta(k));
    }
    return out;
  });
}

AuditSection audit_witness(const AuditOptions& opts) {
  const auto count = static_cast<std::size_t>(opts.witness_matrices);
  return run_tasks("witness", count, opts, [&](std::size_t t) {
    const std::uint64_t seed = task_seed(opts, 59, t);
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, 2, 8);
    const int m = uniform_int(rng, 2, 8);
    std::vector<Outcome> out;

    const Matrix G = random_general(n, m, rng);
    const WitnessResult wg = assumption3_violation_witness(G);
    const double norm2 = std::pow(spectral_norm(G), 2.0);
    bool sound = !wg.rows_orthogonal && wg.witness.has_value();
    double lhs = 0.0;
    if (sound) {
      const auto& w = *wg.witness;
      lhs = w.lhs;
      sound = w.rhs == 0.0 && w.lhs > 1e-16 * norm2 * w.e.squaredNorm();
    }
    out.push_back({sound, 0.0, lhs, {{"seed", seed}, {"kind", "general"}, {"n", n}, {"m", m}, {"note", wg.note}}});

    const Matrix S = random_row_orthogonal(std::min(n, m), rng);
    const WitnessResult ws = assumption3_violation_witness(S);
    out.push_back({ws.rows_orthogonal && !ws.witness, 0.0, 0.0, {{"seed", seed}, {"kind", "sigma_vt"}}});

    const Preconditioned p = precondition(G, Vector::Zero(n));
    const WitnessResult wp = assumption3_violation_witness(p.A_tilde);
    out.push_back({!wp.witness.has_value(), 0.0, 0.0, {{"seed", seed}, {"kind", "preconditioned"}}});
    return out;
  });
}

AuditReport run_audits(const std::string& suite, const AuditOptions& opts) {
  const std::vector<std::string> known{"lemmas", "decomposition", "propositions", "rate", "witness", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) {
    fail("invalid_argument", "unknown audit suite '" + suite +
                                 "' (expected lemmas, decomposition, propositions, rate, witness or all)");
  }
  require(opts.max_k >= 1 && opts.max_k <= 12, "audits: max_k must lie in [1, 12]");
  AuditReport rep;
  rep.suite = suite;
  const bool all = suite == "all";
  if (all || suite == "lemmas") {
    rep.sections.push_back(audit_partial_sums(opts));
    rep.sections.push_back(audit_reindex(opts));
    rep.sections.push_back(audit_kernel(opts));
    rep.sections.push_back(audit_indexsum(opts));
    rep.sections.push_back(audit_count(opts));
    rep.sections.push_back(audit_ppg_sums(opts));
  }
  if (all || suite == "decomposition") rep.sections.push_back(audit_decomposition(opts));
  if (all || suite == "propositions") {
    rep.sections.push_back(audit_apx_bound(opts));
    rep.sections.push_back(audit_ppg_bound(opts));
  }
  if (all || suite == "rate") rep.sections.push_back(audit_rate_bound(opts));
  if (all || suite == "witness") rep.sections.push_back(audit_witness(opts));
  return rep;
}

}  // namespace sgdsat
