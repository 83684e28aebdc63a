#pragma once

#include <array>
#include <cstdint>
#include <numeric>

namespace streamcover {

// Space is measured in stored element instances: one unit per element id held
// in a coverage set or a stored set, per retained sketch hash, per hash
// coefficient, per solution index.
enum class Store : std::size_t {
  CoverageSet = 0,
  StoredSets = 1,
  SketchValues = 2,
  HashCoeffs = 3,
  SolutionIds = 4,
};

inline constexpr std::size_t kStoreKinds = 5;

inline const char* to_string(Store s) {
  switch (s) {
    case Store::CoverageSet: return "coverage_sets";
    case Store::StoredSets: return "stored_sets";
    case Store::SketchValues: return "sketch_values";
    case Store::HashCoeffs: return "hash_coeffs";
    case Store::SolutionIds: return "solution_ids";
  }
  return "?";
}

struct SpaceBreakdown {
  std::array<std::uint64_t, kStoreKinds> by_store{};
  std::uint64_t current_total = 0;
  std::uint64_t peak = 0;
};

struct SpaceAccount {
  std::array<std::uint64_t, kStoreKinds> current{};
  std::uint64_t peak = 0;

  void add(Store s, std::uint64_t n) {
    current[static_cast<std::size_t>(s)] += n;
    const std::uint64_t t = total();
    if (t > peak) peak = t;
  }

  void remove(Store s, std::uint64_t n) { current[static_cast<std::size_t>(s)] -= n; }

  std::uint64_t total() const {
    return std::accumulate(current.begin(), current.end(), std::uint64_t{0});
  }

  std::uint64_t of(Store s) const { return current[static_cast<std::size_t>(s)]; }

  SpaceBreakdown snapshot() const { return {current, total(), peak}; }
};

}  // namespace streamcover
