#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdsat/numerics.hpp"
#include "sgdsat/solvers.hpp"

namespace sgdsat {

struct AuditOptions {
  int max_k = 12;
  std::uint64_t seed = 20240611;
  int threads = 1;
  int decomposition_configs = 500;
  int kernel_configs = 1000;
  int witness_matrices = 100;
  int rate_max_k = 500;
  std::size_t max_failures_kept = 50;
};

/// One audited inequality family. worst_slack is min (rhs - lhs) / max(|lhs|, |rhs|)
/// over the checks, so it is negative exactly when some check fails.
struct AuditSection {
  std::string name;
  long long passed = 0;
  long long total = 0;
  double worst_slack = 1.0;
  std::vector<nlohmann::json> failures;

  bool ok() const { return passed == total; }
  void record(bool pass, double lhs, double rhs, const nlohmann::json& config, std::size_t keep);
};

struct AuditReport {
  std::string suite;
  std::vector<AuditSection> sections;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

/// Suites: lemmas, decomposition, propositions, rate, witness, all.
AuditReport run_audits(const std::string& suite, const AuditOptions& opts = {});

AuditSection audit_partial_sums(const AuditOptions& opts);
AuditSection audit_reindex(const AuditOptions& opts);
AuditSection audit_kernel(const AuditOptions& opts);
AuditSection audit_indexsum(const AuditOptions& opts);
AuditSection audit_count(const AuditOptions& opts);
AuditSection audit_ppg_sums(const AuditOptions& opts);
AuditSection audit_decomposition(const AuditOptions& opts);
/// Closed-form bounds on the enumerated approximation and propagation sums.
AuditSection audit_apx_bound(const AuditOptions& opts);
AuditSection audit_ppg_bound(const AuditOptions& opts);
AuditSection audit_rate_bound(const AuditOptions& opts);
AuditSection audit_witness(const AuditOptions& opts);

/// Square n x n matrix diag(sigma) V^t with V Haar-random orthogonal and
/// sigma_i uniform in [lo, hi] sorted decreasingly; rows are orthogonal.
Matrix random_row_orthogonal(int n, std::mt19937_64& rng, double lo = 0.05, double hi = 1.0);
/// Dense Gaussian matrix whose rows are generically not orthogonal.
Matrix random_general(int n, int m, std::mt19937_64& rng);
/// Haar-distributed orthogonal matrix via QR with sign correction.
Matrix random_orthogonal(int n, std::mt19937_64& rng);

}  // namespace sgdsat
