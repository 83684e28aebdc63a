#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "streamcover/prng.hpp"

namespace streamcover {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

// Running tally of field multiplications. Each polynomial evaluation of
// independence gamma adds exactly gamma-1. Per-run, merged by the caller
// when work is sharded.
struct MulmodCounter {
  std::uint64_t count = 0;
};

// Degree-(gamma-1) polynomial over the prime field F_p, reduced into
// [0, range). Drawing the coefficients uniformly at random yields a
// gamma-independent hash family. Immutable after construction.
class PolyHash {
 public:
  PolyHash(std::vector<std::uint64_t> coeffs, std::uint64_t prime, std::uint64_t range,
           MulmodCounter* counter = nullptr)
      : coeffs_(std::move(coeffs)), prime_(prime), range_(range), counter_(counter) {
    if (coeffs_.empty()) throw std::invalid_argument("poly hash: need at least one coefficient");
    if (range_ < 1) throw std::invalid_argument("poly hash: range must be >= 1");
    for (std::uint64_t a : coeffs_)
      if (a >= prime_) throw std::invalid_argument("poly hash: coefficient outside the field");
  }

  // Horner evaluation in the field, then mod range. Requires x < prime.
  std::uint64_t operator()(std::uint64_t x) const {
    assert(x < prime_);
    std::uint64_t acc = coeffs_.back();
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
      acc = mulmod(acc, x);
      acc += coeffs_[i];
      if (acc >= prime_) acc -= prime_;
    }
    if (counter_) counter_->count += coeffs_.size() - 1;
    return acc % range_;
  }

  std::uint64_t prime() const { return prime_; }
  std::uint64_t range() const { return range_; }
  std::size_t independence() const { return coeffs_.size(); }
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

 private:
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const {
    const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    if (prime_ == kMersenne61) {
      // Fold the 122-bit product: 2^61 = 1 (mod 2^61 - 1).
      std::uint64_t lo = static_cast<std::uint64_t>(t) & kMersenne61;
      std::uint64_t hi = static_cast<std::uint64_t>(t >> 61);
      std::uint64_t s = lo + hi;
      if (s >= kMersenne61) s -= kMersenne61;
      return s;
    }
    return static_cast<std::uint64_t>(t % prime_);
  }

  std::vector<std::uint64_t> coeffs_;
  std::uint64_t prime_;
  std::uint64_t range_;
  MulmodCounter* counter_;
};

// Draw a fresh member of the gamma-independent family H_{gamma,range}.
// The field prime must exceed the universe bound so that distinct element
// ids stay distinct field points.
inline PolyHash sample_hash(std::size_t gamma, std::uint64_t range_v, std::uint64_t seed,
                            std::uint64_t universe_bound, MulmodCounter* counter = nullptr,
                            std::uint64_t prime = kMersenne61) {
  if (gamma < 1) throw std::invalid_argument("sample_hash: independence must be >= 1");
  if (range_v < 1) throw std::invalid_argument("sample_hash: range must be >= 1");
  if (universe_bound >= prime)
    throw std::domain_error("sample_hash: universe bound must be below the field prime");
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> coeffs(gamma);
  for (auto& a : coeffs) {
    if (prime == kMersenne61) {
      for (;;) {
        const std::uint64_t r = rng.next() >> 3;  // 61 bits
        if (r < prime) {
          a = r;
          break;
        }
      }
    } else {
      a = rng.next_below(prime);
    }
  }
  return PolyHash(std::move(coeffs), prime, range_v, counter);
}

// Hashed Bernoulli filter: keep x iff hash(x) < threshold. The threshold is
// the integerized sampling parameter min(range, ceil(lambda)); with integer
// hash values this is the same predicate as hash(x) < lambda. Clamping at
// the range covers the lambda >= range regime, where everything is kept.
struct Subsampler {
  PolyHash hash;
  std::uint64_t threshold;

  bool sampled(std::uint64_t x) const { return hash(x) < threshold; }

  double sample_prob() const {
    return static_cast<double>(threshold) / static_cast<double>(hash.range());
  }
};

inline Subsampler make_subsampler(std::size_t gamma, std::uint64_t range_v, double lambda,
                                  std::uint64_t seed, std::uint64_t universe_bound,
                                  MulmodCounter* counter = nullptr,
                                  std::uint64_t prime = kMersenne61) {
  std::uint64_t threshold = 0;
  if (lambda > 0.0) {
    const double c = std::ceil(lambda);
    threshold = c >= static_cast<double>(range_v) ? range_v : static_cast<std::uint64_t>(c);
  }
  return Subsampler{sample_hash(gamma, range_v, seed, universe_bound, counter, prime), threshold};
}

}  // namespace streamcover
