#include "sgdsat/index_sets.hpp"

#include <algorithm>
#include <string>

#include "sgdsat/error.hpp"

namespace sgdsat {

std::uint64_t index_set_count(int k1, int k2, int i) {
  require(i >= 0, "index set: cardinality must be >= 0");
  const long long size = static_cast<long long>(k2) - k1 + 1;
  require(size >= 0, "index set: need k1 <= k2 + 1");
  if (i == 0) return 1;
  if (i > size) return 0;
  // C(size, i) via the multiplicative formula, exact in 64 bits here.
  std::uint64_t c = 1;
  for (int t = 1; t <= i; ++t) {
    c = c * static_cast<std::uint64_t>(size - i + t) / static_cast<std::uint64_t>(t);
  }
  return c;
}

IndexSet::IndexSet(int k1, int k2, int i, std::size_t cap) : k1_(k1), k2_(k2), i_(i) {
  const std::uint64_t total = index_set_count(k1, k2, i);
  if (total > cap) {
    fail("budget_exceeded", "index set [" + std::to_string(k1) + "," + std::to_string(k2) + "] of size " +
                                std::to_string(i) + " has " + std::to_string(total) + " members (cap " +
                                std::to_string(cap) + ")");
  }
  count_ = static_cast<std::size_t>(total);
  if (i == 0 || count_ == 0) return;
  flat_.reserve(count_ * static_cast<std::size_t>(i));

  // Odometer over j_1 > ... > j_i, starting from the smallest tuple.
  std::vector<int> cur(i);
  for (int t = 0; t < i; ++t) cur[t] = k1 + (i - 1 - t);
  while (true) {
    flat_.insert(flat_.end(), cur.begin(), cur.end());
    int t = i - 1;
    // Position t can grow up to the entry before it minus one (or k2 for t = 0).
    while (t >= 0 && cur[t] == (t == 0 ? k2 : cur[t - 1] - 1)) --t;
    if (t < 0) break;
    ++cur[t];
    for (int u = t + 1; u < i; ++u) cur[u] = k1 + (i - 1 - u);
  }
}

Matrix product_operator(const Matrix& B, std::span<const int> J, const StepSchedule& sched) {
  require(B.rows() == B.cols(), "product_operator: B must be square");
  Matrix P = Matrix::Identity(B.rows(), B.cols());
  for (int j : J) {
    require(j >= 1, "product_operator: indices start at 1");
    P = (P - sched.eta(j) * (P * B)).eval();
  }
  return P;
}

SpectralProducts::SpectralProducts(const Matrix& B, const StepSchedule& sched, int k_max)
    : eig_(sym_eigen(B)) {
  require(k_max >= 0, "SpectralProducts: k_max must be >= 0");
  const int d = dim();
  eta_.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  factor_.assign((static_cast<std::size_t>(k_max) + 1) * d, 1.0);
  for (int j = 1; j <= k_max; ++j) {
    eta_[j] = sched.eta(j);
    for (int r = 0; r < d; ++r) factor_[static_cast<std::size_t>(j) * d + r] = 1.0 - eta_[j] * eig_.lambda(r);
  }
}

double SpectralProducts::range_product(int a, int b, std::span<const int> excluded, int r) const {
  double p = 1.0;
  for (int t = a; t <= b; ++t) {
    if (std::find(excluded.begin(), excluded.end(), t) != excluded.end()) continue;
    p *= factor(t, r);
  }
  return p;
}

}  // namespace sgdsat
