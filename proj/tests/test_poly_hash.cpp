#include <array>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "doctest.h"

#include "streamcover/poly_hash.hpp"
#include "test_support.hpp"

using namespace streamcover;

TEST_CASE("constant polynomial hashes everything to its coefficient") {
  PolyHash h({5}, 11, 4);
  for (std::uint64_t x : {0ULL, 1ULL, 7ULL, 10ULL}) CHECK(h(x) == 5 % 4);
  CHECK(h.independence() == 1);
}

TEST_CASE("hand-evaluated small-field cases") {
  // (2 + 3x) mod 11 mod 5 at x=4: 14 mod 11 = 3, 3 mod 5 = 3
  PolyHash h({2, 3}, 11, 5);
  CHECK(h(4) == 3);

  // (1 + x + x^2) mod 13 mod 13 at x=3: 13 mod 13 = 0
  PolyHash q({1, 1, 1}, 13, 13);
  CHECK(q(3) == 0);
}

TEST_CASE("horner evaluation matches the naive power sum") {
  const std::uint64_t prime = 97;
  SplitMix64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t gamma = 1 + rng.next_below(6);
    std::vector<std::uint64_t> coeffs(gamma);
    for (auto& a : coeffs) a = rng.next_below(prime);
    const std::uint64_t v = 1 + rng.next_below(40);
    PolyHash h(coeffs, prime, v);
    const std::uint64_t x = rng.next_below(prime);
    std::uint64_t naive = 0, xp = 1;
    for (std::uint64_t a : coeffs) {
      naive = (naive + a * xp) % prime;
      xp = (xp * x) % prime;
    }
    CHECK(h(x) == naive % v);
  }
}

TEST_CASE("mersenne reduction agrees with 128-bit modulo") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t a, b;
    do { a = rng.next() >> 3; } while (a >= kMersenne61);
    do { b = rng.next() >> 3; } while (b >= kMersenne61);
    PolyHash h({0, a}, kMersenne61, kMersenne61);  // f(x) = a*x
    const auto expected = static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % kMersenne61);
    CHECK(h(b) == expected);
  }
}

TEST_CASE("sampled hashes are deterministic in the seed") {
  PolyHash a = sample_hash(5, 64, 2024, 1000);
  PolyHash b = sample_hash(5, 64, 2024, 1000);
  CHECK(a.coefficients() == b.coefficients());
  PolyHash c = sample_hash(5, 64, 2025, 1000);
  CHECK(a.coefficients() != c.coefficients());
  for (std::uint64_t coeff : a.coefficients()) CHECK(coeff < kMersenne61);
}

TEST_CASE("sampling requires the prime to exceed the universe bound") {
  CHECK_THROWS_AS(sample_hash(2, 8, 1, 11, nullptr, 11), std::domain_error);
  CHECK_NOTHROW(sample_hash(2, 8, 1, 10, nullptr, 11));
}

TEST_CASE("the multiply counter grows by independence minus one per evaluation") {
  MulmodCounter counter;
  PolyHash h = sample_hash(5, 64, 3, 1000, &counter);
  const std::uint64_t n = 1000;
  for (std::uint64_t x = 0; x < n; ++x) (void)h(x);
  CHECK(counter.count == n * 4);

  MulmodCounter counter1;
  PolyHash c1 = sample_hash(1, 64, 3, 1000, &counter1);
  for (std::uint64_t x = 0; x < n; ++x) (void)c1(x);
  CHECK(counter1.count == 0);
}

TEST_CASE("subsampler threshold clamps to full and empty sampling") {
  Subsampler full = make_subsampler(2, 16, 100.0, 1, 1000);  // lambda >= range
  Subsampler none = make_subsampler(2, 16, 0.0, 1, 1000);
  CHECK(full.threshold == 16);
  CHECK(full.sample_prob() == 1.0);
  CHECK(none.threshold == 0);
  for (std::uint64_t x = 0; x < 64; ++x) {
    CHECK(full.sampled(x));
    CHECK_FALSE(none.sampled(x));
  }
}

TEST_CASE("sampled fraction concentrates around lambda over v") {
  const std::size_t n = 100000;
  Subsampler s = make_subsampler(2, 100, 25.0, 0xfeed5eed, n + 1);
  std::size_t hits = 0;
  for (std::uint64_t x = 0; x < n; ++x) hits += s.sampled(x) ? 1 : 0;
  const double p = 0.25;
  const double rate = double(hits) / double(n);
  const double sigma = std::sqrt(p * (1 - p) / double(n));
  CHECK(std::abs(rate - p) <= 3 * sigma);
}

TEST_CASE("bucket frequencies pass a chi-square uniformity test") {
  const std::size_t n = 100000;
  const std::uint64_t v = 64;
  PolyHash h = sample_hash(4, v, 0xc0ffee, n + 1);
  std::vector<std::uint64_t> counts(v, 0);
  for (std::uint64_t x = 0; x < n; ++x) ++counts[h(x)];
  const double stat = testsupport::chi_square_uniform(counts, double(n) / double(v));
  CHECK(stat < testsupport::chi_square_critical(int(v) - 1));
}

TEST_CASE("degree-one hashes are pairwise independent across seeds") {
  const std::uint64_t x = 12345, y = 67890;
  std::array<std::array<std::uint64_t, 2>, 2> joint{};
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    PolyHash h = sample_hash(2, 2, derive_seed(0xabcdef, seed), 100000);
    joint[h(x)][h(y)] += 1;
  }
  const double stat = testsupport::chi_square_independence_2x2(joint);
  CHECK(stat < testsupport::chi_square_critical(1));
}
