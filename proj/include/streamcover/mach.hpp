#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "streamcover/f0_sketch.hpp"
#include "streamcover/poly_hash.hpp"
#include "streamcover/prng.hpp"
#include "streamcover/set_stream.hpp"
#include "streamcover/space_account.hpp"

namespace streamcover {

// Independence of the subsampling hash family.
//   Pairwise:  gamma = 2
//   Reduced:   gamma = floor((c/3) k ln m)
//   Original:  gamma = ceil(2 lambda)
//   Full:      no hashing at all; every element is kept (deterministic)
enum class GammaMode { Pairwise, Reduced, Original, Full };

inline const char* to_string(GammaMode m) {
  switch (m) {
    case GammaMode::Pairwise: return "pairwise";
    case GammaMode::Reduced: return "reduced";
    case GammaMode::Original: return "original";
    case GammaMode::Full: return "full";
  }
  return "?";
}

inline GammaMode parse_gamma_mode(const std::string& s) {
  if (s == "pairwise") return GammaMode::Pairwise;
  if (s == "reduced") return GammaMode::Reduced;
  if (s == "original") return GammaMode::Original;
  if (s == "full") return GammaMode::Full;
  throw std::invalid_argument("unknown gamma mode: " + s);
}

struct MachParams {
  std::size_t k = 1;
  double eps = 0.25;
  double c = 1.0;  // lambda constant
  GammaMode gamma_mode = GammaMode::Pairwise;
  std::uint64_t seed = 0;
  // true: per-guess distinct-count sketches, final guess by largest estimate.
  // false: sketch-free scan of the guess ladder.
  bool use_f0_selection = false;
  std::optional<std::uint64_t> universe_bound_override;
  bool record_admissions = false;
  std::uint64_t field_prime = kMersenne61;

  void validate() const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("eps must be in (0, 1)");
    if (!(c > 0.0)) throw std::invalid_argument("c must be > 0");
  }
};

// Everything computed from (k, eps, c, mode) and the stream statistics.
struct DerivedParams {
  double lambda = 0.0;      // c * eps^-2 * k * ln m  (space budget)
  std::uint64_t gamma = 0;  // hash independence; 0 in full-sampling mode
  int num_passes = 0;       // thresholding passes: 1 + ceil(log_{1+eps}(4e))
  double r0 = 0.0;          // initial threshold 2(1+eps) lambda / k
  std::vector<std::uint64_t> guesses;  // v_g = 2^{g-1} * max set size, ladder
};

// Effective approximation slack: the coverage guarantee is 1 - 1/e - delta(eps).
inline double delta_eps(double eps) { return eps * (3.0 - 1.0 / std::numbers::e - eps); }

inline DerivedParams derive_params(std::size_t k, double eps, double c, GammaMode mode,
                                   const StreamStats& stats, std::uint64_t n_bound) {
  if (stats.num_sets < 1) throw std::invalid_argument("derive_params: stream statistics are empty");
  if (n_bound < 1) throw std::invalid_argument("derive_params: universe bound must be >= 1");
  DerivedParams d;
  const double log_m = std::log(static_cast<double>(stats.num_sets));
  d.lambda = c / (eps * eps) * static_cast<double>(k) * log_m;
  switch (mode) {
    case GammaMode::Pairwise:
      d.gamma = 2;
      break;
    case GammaMode::Reduced:
      // floor((c/3) k ln m); at least 1 so a hash exists on tiny streams
      d.gamma = std::max<std::uint64_t>(
          1, static_cast<std::uint64_t>(std::floor(c * static_cast<double>(k) * log_m / 3.0)));
      break;
    case GammaMode::Original:
      d.gamma = static_cast<std::uint64_t>(std::ceil(2.0 * d.lambda));
      break;
    case GammaMode::Full:
      d.gamma = 0;
      break;
  }
  d.num_passes =
      1 + static_cast<int>(std::ceil(std::log(4.0 * std::numbers::e) / std::log(1.0 + eps)));
  d.r0 = 2.0 * (1.0 + eps) * d.lambda / static_cast<double>(k);

  const std::uint64_t max_size = stats.max_set_size;
  const std::uint64_t cap = std::min<std::uint64_t>(
      n_bound, max_size > std::numeric_limits<std::uint64_t>::max() / k
                   ? std::numeric_limits<std::uint64_t>::max()
                   : static_cast<std::uint64_t>(k) * max_size);
  for (std::uint64_t v = max_size; v >= 1 && v <= cap; v *= 2) {
    d.guesses.push_back(v);
    if (v > cap / 2) break;
  }
  if (d.guesses.empty()) throw std::invalid_argument("derive_params: guess ladder is empty");
  return d;
}

// Per-guess thresholding instance. `budget` is the guess's estimate of the
// optimal coverage in its own subsample scale: min(lambda, v) under hashing
// (the two coincide except where the sampler clamps to probability 1), and
// plain v under full sampling.
struct GuessState {
  std::uint64_t v = 0;
  double budget = 0.0;
  std::optional<Subsampler> sampler;  // nullopt: full sampling
  std::unordered_set<std::uint64_t> coverage;  // C', subsampled covered elements
  std::vector<std::size_t> solution;           // admitted set indices, stream order
  bool active = true;
  int deactivated_pass = -1;
  std::optional<F0Sketch> sketch;
};

// Sketch-free final selection: largest guess still active whose subsampled
// coverage reaches (1-eps)(1-1/e-eps) times its budget.
inline std::optional<std::size_t> find_guess(const std::vector<GuessState>& states, double eps) {
  const double q = (1.0 - eps) * (1.0 - 1.0 / std::numbers::e - eps);
  for (std::size_t i = states.size(); i-- > 0;) {
    if (states[i].active && static_cast<double>(states[i].coverage.size()) >= q * states[i].budget)
      return i;
  }
  return std::nullopt;
}

struct AdmissionEvent {
  int pass;
  std::size_t guess;
  std::size_t set_index;
  std::size_t contribution;
  double threshold;
};

struct GuessTrace {
  std::uint64_t v = 0;
  double budget = 0.0;
  std::uint64_t sample_threshold = 0;  // hash values below this are kept; == v when clamped
  bool active = true;
  int deactivated_pass = -1;
  std::size_t coverage_size = 0;
  std::size_t solution_size = 0;
  double sketch_estimate = 0.0;
};

struct RunResult {
  std::vector<std::size_t> solution;
  std::uint64_t coverage = 0;  // exact |union of selected sets|
  int passes = 0;              // statistics pass + thresholding passes; scoring pass excluded
  std::uint64_t peak_elements = 0;
  std::uint64_t hash_mulmods = 0;
  std::uint64_t selected_guess = 0;
  bool no_qualifying_guess = false;
  bool budget_violated = false;  // an active coverage exceeded its cap; must stay false
  bool scored_by_extra_pass = false;
  DerivedParams derived;
  std::vector<GuessTrace> guesses;
  std::vector<AdmissionEvent> admissions;
  SpaceAccount space;
};

// Exact coverage of a solution, recomputed from the stream in one pass.
inline std::uint64_t exact_coverage(const SetStream& stream, std::span<const std::size_t> solution) {
  const std::unordered_set<std::size_t> picked(solution.begin(), solution.end());
  std::unordered_set<std::uint64_t> covered;
  stream.for_each([&](const SetRecord& rec) {
    if (!picked.contains(rec.index)) return;
    covered.insert(rec.elements.begin(), rec.elements.end());
  });
  return covered.size();
}

// Multi-pass subsampled thresholding over a ladder of coverage guesses.
// Consumes 1 statistics pass plus derived.num_passes thresholding passes;
// the final scoring pass is diagnostic and not billed.
inline RunResult run_mach(SetStream& stream, const MachParams& params) {
  params.validate();
  const StreamStats& st = stream.stats();
  const std::uint64_t n_bound = params.universe_bound_override.value_or(st.universe_bound);

  RunResult res;
  res.derived = derive_params(params.k, params.eps, params.c, params.gamma_mode, st, n_bound);
  const DerivedParams& dp = res.derived;
  const double eps = params.eps;
  const bool full = params.gamma_mode == GammaMode::Full;

  MulmodCounter mulmods;
  SpaceAccount space;

  std::vector<GuessState> states;
  std::vector<double> cap;        // deactivation bound per guess
  std::vector<double> threshold;  // current admission threshold per guess
  states.reserve(dp.guesses.size());
  for (std::size_t g = 0; g < dp.guesses.size(); ++g) {
    GuessState gs;
    gs.v = dp.guesses[g];
    if (full) {
      gs.budget = static_cast<double>(gs.v);
    } else {
      gs.budget = std::min(dp.lambda, static_cast<double>(gs.v));
      gs.sampler = make_subsampler(dp.gamma, gs.v, dp.lambda, derive_seed(params.seed, g), n_bound,
                                   &mulmods, params.field_prime);
      space.add(Store::HashCoeffs, dp.gamma);
    }
    if (params.use_f0_selection) {
      gs.sketch.emplace(eps, 0.125, derive_seed(params.seed, 0x80000000ULL + g), &mulmods);
    }
    cap.push_back(2.0 * (1.0 + eps) * (full ? static_cast<double>(gs.v) : dp.lambda));
    threshold.push_back(2.0 * (1.0 + eps) * gs.budget / static_cast<double>(params.k));
    states.push_back(std::move(gs));
  }

  std::vector<std::uint64_t> novel;
  for (int pass = 1; pass <= dp.num_passes; ++pass) {
    stream.for_each([&](const SetRecord& rec) {
      for (std::size_t g = 0; g < states.size(); ++g) {
        GuessState& gs = states[g];
        if (!gs.active) continue;  // terminated instance, state frozen

        novel.clear();
        for (std::uint64_t x : rec.elements) {
          const bool kept = gs.sampler ? gs.sampler->sampled(x) : true;
          if (kept && !gs.coverage.contains(x)) novel.push_back(x);
        }

        // Bad-guess check: a coverage this large proves the guess is wrong.
        if (static_cast<double>(gs.coverage.size() + novel.size()) > cap[g]) {
          gs.active = false;
          gs.deactivated_pass = pass;
          continue;
        }

        if (gs.solution.size() < params.k &&
            static_cast<double>(novel.size()) >= threshold[g]) {
          if (gs.sketch) {
            int delta = 0;
            for (std::uint64_t x : rec.elements) delta += gs.sketch->insert(x);
            space.add(Store::SketchValues, static_cast<std::uint64_t>(delta));
          }
          gs.coverage.insert(novel.begin(), novel.end());
          space.add(Store::CoverageSet, novel.size());
          gs.solution.push_back(rec.index);
          space.add(Store::SolutionIds, 1);
          if (params.record_admissions)
            res.admissions.push_back({pass, g, rec.index, novel.size(), threshold[g]});
          if (static_cast<double>(gs.coverage.size()) > cap[g]) res.budget_violated = true;
        }
      }
    });
    for (double& t : threshold) t /= 1.0 + eps;

#if !defined(NDEBUG) || defined(STREAMCOVER_VERIFY_SPACE)
    // Shadow recount: the incremental account must agree with the structures.
    std::uint64_t recount = 0;
    for (const GuessState& gs : states) {
      recount += gs.coverage.size() + gs.solution.size();
      if (gs.sampler) recount += gs.sampler->hash.independence();
      if (gs.sketch) recount += gs.sketch->retained_total();
    }
    if (recount != space.total())
      throw std::logic_error("space account drifted from the structure recount");
#endif
  }

  std::optional<std::size_t> selected;
  if (params.use_f0_selection) {
    double best = -1.0;
    for (std::size_t g = 0; g < states.size(); ++g) {
      if (!states[g].active) continue;
      const double est = states[g].sketch->estimate();
      if (est > best) {
        best = est;
        selected = g;
      }
    }
  } else {
    selected = find_guess(states, eps);
  }
  if (!selected) {
    // Best effort: largest subsampled coverage, preferring still-active guesses.
    res.no_qualifying_guess = true;
    std::size_t best_g = 0;
    std::size_t best_size = 0;
    bool best_active = false;
    for (std::size_t g = 0; g < states.size(); ++g) {
      const bool better = (states[g].active && !best_active) ||
                          (states[g].active == best_active && states[g].coverage.size() > best_size);
      if (better) {
        best_g = g;
        best_size = states[g].coverage.size();
        best_active = states[g].active;
      }
    }
    selected = best_g;
  }

  const GuessState& chosen = states[*selected];
  res.solution = chosen.solution;
  res.selected_guess = chosen.v;
  res.passes = 1 + dp.num_passes;
  res.hash_mulmods = mulmods.count;
  res.peak_elements = space.peak;
  res.space = space;
  res.guesses.reserve(states.size());
  for (const GuessState& gs : states) {
    GuessTrace t;
    t.v = gs.v;
    t.budget = gs.budget;
    t.sample_threshold = gs.sampler ? gs.sampler->threshold : gs.v;
    t.active = gs.active;
    t.deactivated_pass = gs.deactivated_pass;
    t.coverage_size = gs.coverage.size();
    t.solution_size = gs.solution.size();
    t.sketch_estimate = gs.sketch ? gs.sketch->estimate() : 0.0;
    res.guesses.push_back(t);
  }
  res.coverage = exact_coverage(stream, res.solution);
  res.scored_by_extra_pass = true;
  return res;
}

// Reference algorithm: k passes, each adding the first set that attains the
// pass's maximum contribution. Exact coverage kept in full — linear space.
inline RunResult run_greedy(SetStream& stream, std::size_t k) {
  if (k < 1) throw std::invalid_argument("run_greedy: k must be >= 1");
  RunResult res;
  SpaceAccount space;
  std::unordered_set<std::uint64_t> covered;
  std::unordered_set<std::size_t> chosen;
  std::vector<std::uint64_t> best_novel;
  std::vector<std::uint64_t> novel;
  for (std::size_t round = 0; round < k; ++round) {
    ++res.passes;
    std::size_t best_index = 0;
    std::size_t best_gain = 0;
    stream.for_each([&](const SetRecord& rec) {
      if (chosen.contains(rec.index)) return;
      novel.clear();
      for (std::uint64_t x : rec.elements)
        if (!covered.contains(x)) novel.push_back(x);
      if (novel.size() > best_gain) {  // ties keep the earliest set
        best_gain = novel.size();
        best_index = rec.index;
        best_novel = novel;
      }
    });
    if (best_gain == 0) break;  // nothing contributes; |I| < k
    chosen.insert(best_index);
    res.solution.push_back(best_index);
    space.add(Store::SolutionIds, 1);
    covered.insert(best_novel.begin(), best_novel.end());
    space.add(Store::CoverageSet, best_novel.size());
  }
  res.coverage = covered.size();
  res.peak_elements = space.peak;
  res.space = space;
  return res;
}

}  // namespace streamcover
