#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "streamcover/mach.hpp"
#include "streamcover/set_stream.hpp"
#include "streamcover/space_account.hpp"

namespace streamcover {

// Comparator algorithms. All of them store exact coverage state (the
// linear-space family); none subsample. Results reuse RunResult with the
// guess-related fields unused. Pass counts include the shared statistics pass.

// Swapping baseline: keep up to k sets in full. Once full, an arriving set
// may replace the stored set with the smallest unique coverage, but only if
// the swap strictly increases the total coverage.
inline RunResult run_sg(SetStream& stream, std::size_t k) {
  if (k < 1) throw std::invalid_argument("run_sg: k must be >= 1");
  (void)stream.stats();

  struct Stored {
    std::size_t index;
    std::vector<std::uint64_t> elements;
  };
  std::vector<Stored> stored;
  RunResult res;
  SpaceAccount space;

  std::unordered_map<std::uint64_t, int> multiplicity;
  std::unordered_set<std::uint64_t> victim_elems;
  stream.for_each([&](const SetRecord& rec) {
    if (rec.elements.empty()) return;
    if (stored.size() < k) {
      stored.push_back({rec.index, rec.elements});
      space.add(Store::StoredSets, rec.elements.size());
      return;
    }

    multiplicity.clear();
    for (const Stored& t : stored)
      for (std::uint64_t e : t.elements) ++multiplicity[e];

    // Victim: minimum unique coverage, earliest slot on ties.
    std::size_t victim = 0;
    std::size_t victim_unique = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < stored.size(); ++i) {
      std::size_t unique = 0;
      for (std::uint64_t e : stored[i].elements)
        if (multiplicity[e] == 1) ++unique;
      if (unique < victim_unique) {
        victim_unique = unique;
        victim = i;
      }
    }

    // Contribution of the arriving set against the coverage without the victim.
    victim_elems.clear();
    victim_elems.insert(stored[victim].elements.begin(), stored[victim].elements.end());
    std::size_t novel = 0;
    for (std::uint64_t e : rec.elements) {
      const auto it = multiplicity.find(e);
      int count = it == multiplicity.end() ? 0 : it->second;
      if (victim_elems.contains(e)) --count;
      if (count == 0) ++novel;
    }

    if (novel > victim_unique) {
      space.remove(Store::StoredSets, stored[victim].elements.size());
      stored[victim] = {rec.index, rec.elements};
      space.add(Store::StoredSets, rec.elements.size());
    }
  });

  std::unordered_set<std::uint64_t> covered;
  for (const Stored& t : stored) {
    res.solution.push_back(t.index);
    covered.insert(t.elements.begin(), t.elements.end());
  }
  res.coverage = covered.size();
  res.passes = 2;  // stats + one streaming pass
  res.peak_elements = space.peak;
  res.space = space;
  return res;
}

namespace detail {

struct ThresholdInstance {
  double v = 0.0;
  std::unordered_set<std::uint64_t> coverage;
  std::vector<std::size_t> solution;
  std::unordered_set<std::size_t> picked;  // guards against re-admission across passes
};

// Geometric guesses (1+eps)^j spanning [max set size, k * max set size].
inline std::vector<ThresholdInstance> guess_instances(const StreamStats& st, std::size_t k,
                                                      double eps) {
  if (st.max_set_size < 1)
    throw std::invalid_argument("guess ladder needs at least one nonempty set");
  const double base = std::log(1.0 + eps);
  const double lo = static_cast<double>(st.max_set_size);
  const double hi = lo * static_cast<double>(k);
  const auto j0 = static_cast<long>(std::floor(std::log(lo) / base));
  const auto j1 = static_cast<long>(std::ceil(std::log(hi) / base));
  std::vector<ThresholdInstance> instances;
  instances.reserve(static_cast<std::size_t>(j1 - j0 + 1));
  for (long j = j0; j <= j1; ++j) {
    ThresholdInstance inst;
    inst.v = std::pow(1.0 + eps, static_cast<double>(j));
    instances.push_back(std::move(inst));
  }
  return instances;
}

inline std::size_t count_novel(const std::vector<std::uint64_t>& elements,
                               const std::unordered_set<std::uint64_t>& coverage) {
  std::size_t n = 0;
  for (std::uint64_t e : elements)
    if (!coverage.contains(e)) ++n;
  return n;
}

inline void admit(ThresholdInstance& inst, const SetRecord& rec, SpaceAccount& space) {
  std::size_t added = 0;
  for (std::uint64_t e : rec.elements) added += inst.coverage.insert(e).second ? 1 : 0;
  space.add(Store::CoverageSet, added);
  inst.solution.push_back(rec.index);
  inst.picked.insert(rec.index);
  space.add(Store::SolutionIds, 1);
}

inline RunResult best_instance_result(std::vector<ThresholdInstance>& instances, int passes,
                                      const SpaceAccount& space) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < instances.size(); ++i)
    if (instances[i].coverage.size() > instances[best].coverage.size()) best = i;
  RunResult res;
  res.solution = instances[best].solution;
  res.coverage = instances[best].coverage.size();
  res.selected_guess = static_cast<std::uint64_t>(std::llround(instances[best].v));
  res.passes = passes;
  res.peak_elements = space.peak;
  res.space = space;
  return res;
}

}  // namespace detail

// One-pass thresholding over parallel guesses of the optimal coverage.
// Instance v admits a set while |I| < k and the contribution is at least
// (v/2 - |C|) / (k - |I|); the instance with the largest coverage wins.
inline RunResult run_bmkk(SetStream& stream, std::size_t k, double eps) {
  if (k < 1) throw std::invalid_argument("run_bmkk: k must be >= 1");
  if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("run_bmkk: eps must be in (0, 1)");
  auto instances = detail::guess_instances(stream.stats(), k, eps);
  SpaceAccount space;
  stream.for_each([&](const SetRecord& rec) {
    for (auto& inst : instances) {
      if (inst.solution.size() >= k) continue;
      const double need = (inst.v / 2.0 - static_cast<double>(inst.coverage.size())) /
                          static_cast<double>(k - inst.solution.size());
      if (static_cast<double>(detail::count_novel(rec.elements, inst.coverage)) >= need)
        detail::admit(inst, rec, space);
    }
  });
  return detail::best_instance_result(instances, 2, space);
}

// Two passes over the same guess ladder. Pass 1 admits on contribution
// >= v/(2k); pass 2 relaxes to (v - |C|) / (2(k - |I|)).
inline RunResult run_2p(SetStream& stream, std::size_t k, double eps) {
  if (k < 1) throw std::invalid_argument("run_2p: k must be >= 1");
  if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("run_2p: eps must be in (0, 1)");
  auto instances = detail::guess_instances(stream.stats(), k, eps);
  SpaceAccount space;
  stream.for_each([&](const SetRecord& rec) {
    for (auto& inst : instances) {
      if (inst.solution.size() >= k) continue;
      const double need = inst.v / (2.0 * static_cast<double>(k));
      if (static_cast<double>(detail::count_novel(rec.elements, inst.coverage)) >= need)
        detail::admit(inst, rec, space);
    }
  });
  stream.for_each([&](const SetRecord& rec) {
    for (auto& inst : instances) {
      if (inst.solution.size() >= k || inst.picked.contains(rec.index)) continue;
      const double need = (inst.v - static_cast<double>(inst.coverage.size())) /
                          (2.0 * static_cast<double>(k - inst.solution.size()));
      if (static_cast<double>(detail::count_novel(rec.elements, inst.coverage)) >= need)
        detail::admit(inst, rec, space);
    }
  });
  return detail::best_instance_result(instances, 3, space);
}

}  // namespace streamcover
