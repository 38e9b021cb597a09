#include <doctest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "sgdsat/index_sets.hpp"
#include "support.hpp"

using namespace sgdsat;

namespace {

std::set<std::vector<int>> as_set(const IndexSet& s) {
  std::set<std::vector<int>> out;
  for (std::size_t t = 0; t < s.count(); ++t) out.insert({s[t].begin(), s[t].end()});
  return out;
}

// Brute force over all subsets of [k1, k2] of size i.
std::set<std::vector<int>> subsets(int k1, int k2, int i) {
  std::set<std::vector<int>> out;
  const int w = k2 - k1 + 1;
  if (w < 0) return out;
  for (unsigned mask = 0; mask < (1u << w); ++mask) {
    if (std::popcount(mask) != i) continue;
    std::vector<int> J;
    for (int b = w - 1; b >= 0; --b)
      if (mask & (1u << b)) J.push_back(k1 + b);
    out.insert(J);
  }
  return out;
}

Matrix sym_psd(int n, std::mt19937_64& rng) {
  const Matrix G = testsupport::gaussian(n, n, rng);
  Matrix B = G.transpose() * G;
  return B / (1.5 * B.norm());
}

}  // namespace

TEST_CASE("pairs from one to three") {
  const IndexSet s(1, 3, 2);
  CHECK(s.count() == 3);
  const std::set<std::vector<int>> want{{2, 1}, {3, 1}, {3, 2}};
  CHECK(as_set(s) == want);
}

TEST_CASE("index sets match subset enumeration") {
  for (int k1 = 1; k1 <= 3; ++k1)
    for (int k2 = k1 - 1; k2 <= 9; ++k2)
      for (int i = 0; i <= 5; ++i) {
        const IndexSet s(k1, k2, i);
        CHECK(as_set(s) == subsets(k1, k2, i));
        CHECK(s.count() == index_set_count(k1, k2, i));
        CHECK(s.count() == as_set(s).size());
        for (std::size_t t = 0; t < s.count(); ++t) CHECK(std::is_sorted(s[t].rbegin(), s[t].rend()));
      }
}

TEST_CASE("empty conventions") {
  CHECK(IndexSet(4, 6, 0).count() == 1);
  CHECK(IndexSet(4, 3, 0).count() == 1);
  CHECK(IndexSet(4, 3, 1).count() == 0);
  CHECK(IndexSet(1, 3, 4).count() == 0);
  CHECK(index_set_count(1, 12, 4) == 495);
}

TEST_CASE("product operator equals explicit factors") {
  std::mt19937_64 rng(51);
  const Matrix B = sym_psd(4, rng);
  const StepSchedule s{0.7, 0.3};
  const std::vector<int> J{5, 3, 2};
  Matrix want = Matrix::Identity(4, 4);
  for (int j : J) want = want * (Matrix::Identity(4, 4) - s.eta(j) * B);
  CHECK((product_operator(B, J, s) - want).norm() < 1e-14);
  CHECK((product_operator(B, {}, s) - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("spectral range products match dense products") {
  std::mt19937_64 rng(52);
  const Matrix B = sym_psd(5, rng);
  const StepSchedule s{0.9, 0.2};
  const SpectralProducts sp(B, s, 12);
  const std::vector<int> excluded{9, 4};
  for (auto [a, b] : {std::pair{1, 12}, {3, 9}, {5, 4}}) {
    std::vector<int> J;
    for (int t = b; t >= a; --t)
      if (std::find(excluded.begin(), excluded.end(), t) == excluded.end()) J.push_back(t);
    const Matrix P = product_operator(B, J, s);
    const Matrix Pq = sp.eig().Q.transpose() * P * sp.eig().Q;
    for (int r = 0; r < 5; ++r) CHECK(sp.range_product(a, b, excluded, r) == doctest::Approx(Pq(r, r)).epsilon(1e-12));
  }
  CHECK(sp.eta(3) == doctest::Approx(0.9 * std::pow(3.0, -0.2)));
  CHECK(sp.factor(3, 1) == doctest::Approx(1.0 - sp.eta(3) * sp.lambda(1)));
}
