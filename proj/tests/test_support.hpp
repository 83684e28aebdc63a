#pragma once

// Shared test utilities. The exhaustive-search oracle here is intentionally
// independent of the library's algorithm code: it only uses the standard
// library, so it can vouch for the algorithms' outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "streamcover/prng.hpp"

namespace testsupport {

using Sets = std::vector<std::vector<std::uint64_t>>;

inline std::uint64_t coverage_of(const Sets& sets, const std::vector<std::size_t>& indices) {
  std::unordered_set<std::uint64_t> covered;
  for (std::size_t i : indices)
    covered.insert(sets.at(i).begin(), sets.at(i).end());
  return covered.size();
}

// Exhaustive optimum over all k-subsets of the family.
inline std::uint64_t brute_force_opt(const Sets& sets, std::size_t k) {
  const std::size_t m = sets.size();
  k = std::min(k, m);
  std::vector<std::size_t> pick(k);
  std::uint64_t best = 0;
  // lexicographic enumeration of combinations
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    best = std::max(best, coverage_of(sets, pick));
    std::size_t i = k;
    while (i-- > 0) {
      if (pick[i] != i + m - k) break;
      if (i == 0) return best;
    }
    if (k == 0) return best;
    ++pick[i];
    for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

struct TinyInstance {
  Sets sets;
  std::size_t k = 1;
};

// Small random family suitable for exhaustive search: m in [4,12] sets over a
// universe of [18,30] elements, set sizes in [2,6], k in [1,4] with k <= m/3
// so the solution never saturates trivially.
inline TinyInstance random_instance(std::uint64_t seed) {
  streamcover::SplitMix64 rng(seed);
  TinyInstance inst;
  const std::size_t m = 4 + rng.next_below(9);
  const std::uint64_t n = 18 + rng.next_below(13);
  inst.k = 1 + rng.next_below(std::min<std::uint64_t>(4, std::max<std::uint64_t>(1, m / 3)));
  inst.sets.resize(m);
  std::unordered_set<std::uint64_t> seen;
  for (auto& s : inst.sets) {
    const std::size_t size = 2 + rng.next_below(5);
    seen.clear();
    while (s.size() < size) {
      const std::uint64_t e = rng.next_below(n);
      if (seen.insert(e).second) s.push_back(e);
    }
  }
  return inst;
}

// Chi-square critical value at the given upper-tail probability.
// Exact table entries for small df, Wilson-Hilferty for the rest (accurate to
// a fraction of a percent, far finer than the test statistics' noise).
inline double chi_square_critical(int df, double alpha = 0.001) {
  if (alpha == 0.001) {
    if (df == 1) return 10.828;
    if (df == 2) return 13.816;
    if (df == 3) return 16.266;
  }
  const double z = 3.090232306167814;  // upper 0.001 quantile of the normal
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

inline double chi_square_uniform(const std::vector<std::uint64_t>& counts, double expected) {
  double stat = 0.0;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// 2x2 contingency test statistic for independence (1 degree of freedom).
inline double chi_square_independence_2x2(const std::array<std::array<std::uint64_t, 2>, 2>& o) {
  const double n = static_cast<double>(o[0][0] + o[0][1] + o[1][0] + o[1][1]);
  double stat = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double row = static_cast<double>(o[i][0] + o[i][1]);
      const double col = static_cast<double>(o[0][j] + o[1][j]);
      const double e = row * col / n;
      const double d = static_cast<double>(o[i][j]) - e;
      stat += d * d / e;
    }
  }
  return stat;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "." + std::to_string(streamcover::splitmix64(counter_)) + ".txt"))
                .string();
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

  void write(const std::string& content) const {
    std::ofstream out(path_);
    out << content;
  }

 private:
  static inline std::uint64_t counter_ = 0x7e57f17e;
  std::string path_;
};

}  // namespace testsupport
