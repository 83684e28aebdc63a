#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "streamcover/poly_hash.hpp"
#include "streamcover/prng.hpp"

namespace streamcover {

// Space constant of the k-minimum-values estimator: capacity t = ceil(c/eps^2).
inline constexpr double kKmvSpaceConstant = 3.0;

// Retains the t smallest distinct hash values seen. With a near-uniform hash
// into [0, H), the t-th smallest value estimates the distinct count as
// (t-1) * H / v_t; below capacity the count is exact.
class KmvSketch {
 public:
  KmvSketch(std::size_t capacity, PolyHash hash) : capacity_(capacity), hash_(std::move(hash)) {
    if (capacity_ < 1) throw std::invalid_argument("kmv sketch: capacity must be >= 1");
  }

  // Returns the retained-count delta (0 or 1), for space accounting.
  int insert(std::uint64_t key) {
    const std::uint64_t h = hash_(key);
    if (smallest_.size() < capacity_) return smallest_.insert(h).second ? 1 : 0;
    if (h >= *smallest_.rbegin()) return 0;
    if (!smallest_.insert(h).second) return 0;
    smallest_.erase(std::prev(smallest_.end()));
    return 0;
  }

  double estimate() const {
    if (smallest_.size() < capacity_) return static_cast<double>(smallest_.size());
    const std::uint64_t vt = *smallest_.rbegin();
    if (vt == 0) return static_cast<double>(smallest_.size());
    return static_cast<double>(capacity_ - 1) * static_cast<double>(hash_.prime()) /
           static_cast<double>(vt);
  }

  std::size_t retained_count() const { return smallest_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::set<std::uint64_t>& retained() const { return smallest_; }
  const PolyHash& hash() const { return hash_; }

  // Union of retained values, trimmed back to capacity.
  static KmvSketch merged(const KmvSketch& a, const KmvSketch& b) {
    KmvSketch out = a;
    for (std::uint64_t h : b.smallest_) {
      out.smallest_.insert(h);
    }
    while (out.smallest_.size() > out.capacity_) out.smallest_.erase(std::prev(out.smallest_.end()));
    return out;
  }

 private:
  std::size_t capacity_;
  PolyHash hash_;
  std::set<std::uint64_t> smallest_;
};

// Distinct-count estimator with an (eps, delta) relative-error contract.
// One KMV instance when delta >= 1/8; otherwise the median of
// ceil(log2(1/delta)) independently hashed instances. Each instance hashes
// with a fresh pairwise-independent polynomial into the full 61-bit field.
class F0Sketch {
 public:
  F0Sketch(double eps, double delta, std::uint64_t seed, MulmodCounter* counter = nullptr)
      : eps_(eps), delta_(delta), seed_(seed) {
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("f0 sketch: eps must be in (0, 1)");
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("f0 sketch: delta must be in (0, 1)");
    const auto capacity = static_cast<std::size_t>(std::ceil(kKmvSpaceConstant / (eps * eps)));
    std::size_t copies = 1;
    if (delta < 0.125) copies = static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta)));
    replicas_.reserve(copies);
    for (std::size_t i = 0; i < copies; ++i) {
      replicas_.emplace_back(
          capacity, sample_hash(2, kMersenne61, derive_seed(seed, i), 0, counter, kMersenne61));
    }
  }

  // Retained-count delta across all replicas.
  int insert(std::uint64_t key) {
    int delta = 0;
    for (auto& r : replicas_) delta += r.insert(key);
    return delta;
  }

  // Median of the replica estimates.
  double estimate() const {
    std::vector<double> est;
    est.reserve(replicas_.size());
    for (const auto& r : replicas_) est.push_back(r.estimate());
    std::sort(est.begin(), est.end());
    const std::size_t n = est.size();
    return n % 2 ? est[n / 2] : 0.5 * (est[n / 2 - 1] + est[n / 2]);
  }

  std::size_t retained_total() const {
    std::size_t total = 0;
    for (const auto& r : replicas_) total += r.retained_count();
    return total;
  }

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  std::size_t replica_count() const { return replicas_.size(); }
  const KmvSketch& replica(std::size_t i) const { return replicas_.at(i); }

  friend F0Sketch merge(const F0Sketch& a, const F0Sketch& b) {
    if (a.seed_ != b.seed_ || a.eps_ != b.eps_ || a.delta_ != b.delta_)
      throw std::invalid_argument("f0 sketch merge: sketches must share hash functions and capacity");
    F0Sketch out = a;
    for (std::size_t i = 0; i < out.replicas_.size(); ++i)
      out.replicas_[i] = KmvSketch::merged(a.replicas_[i], b.replicas_[i]);
    return out;
  }

 private:
  double eps_;
  double delta_;
  std::uint64_t seed_;
  std::vector<KmvSketch> replicas_;
};

}  // namespace streamcover
