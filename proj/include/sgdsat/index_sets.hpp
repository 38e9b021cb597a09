#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgdsat/numerics.hpp"
#include "sgdsat/solvers.hpp"

namespace sgdsat {

/// All strictly decreasing tuples j_1 > j_2 > ... > j_i drawn from [k1, k2].
///
/// i = 0 yields the single empty tuple. An empty range (k1 = k2 + 1) or
/// i > k2 - k1 + 1 yields no tuples, so sums over the family are empty sums.
class IndexSet {
 public:
  IndexSet(int k1, int k2, int i, std::size_t cap = 10'000'000);

  int k1() const { return k1_; }
  int k2() const { return k2_; }
  int cardinality() const { return i_; }
  std::size_t count() const { return count_; }
  std::span<const int> operator[](std::size_t t) const {
    return {flat_.data() + t * static_cast<std::size_t>(i_), static_cast<std::size_t>(i_)};
  }

 private:
  int k1_, k2_, i_;
  std::size_t count_ = 0;
  std::vector<int> flat_;
};

inline IndexSet enumerate_index_sets(int k1, int k2, int i) { return IndexSet(k1, k2, i); }

/// C(k2 - k1 + 1, i) with the conventions above.
std::uint64_t index_set_count(int k1, int k2, int i);

/// prod_{j in J} (I - eta_j B); the identity for empty J.
Matrix product_operator(const Matrix& B, std::span<const int> J, const StepSchedule& sched);

/// Eigenvalues of B and the per-step scalar factors 1 - eta_j lambda_r for
/// j = 1..k_max, so products of commuting factors can be evaluated on the
/// spectrum.
class SpectralProducts {
 public:
  SpectralProducts(const Matrix& B, const StepSchedule& sched, int k_max);

  const SymEigen& eig() const { return eig_; }
  int dim() const { return static_cast<int>(eig_.lambda.size()); }
  double lambda(int r) const { return eig_.lambda(r); }
  double eta(int j) const { return eta_[j]; }
  double factor(int j, int r) const { return factor_[static_cast<std::size_t>(j) * dim() + r]; }

  /// prod over t in [a, b] minus `excluded` of (1 - eta_t lambda_r).
  double range_product(int a, int b, std::span<const int> excluded, int r) const;

 private:
  SymEigen eig_;
  std::vector<double> eta_;
  std::vector<double> factor_;
};

}  // namespace sgdsat
