#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <unordered_set>
#include <variant>
#include <vector>

#include "streamcover/prng.hpp"

namespace streamcover {

// One set of the stream. Element ids are deduplicated, first occurrence wins.
// Stream iteration reuses a single record buffer; copy what you keep.
struct SetRecord {
  std::size_t index = 0;
  std::vector<std::uint64_t> elements;
};

struct StreamStats {
  std::size_t num_sets = 0;        // m
  std::size_t max_set_size = 0;    // largest |S_i|
  std::uint64_t total_elements = 0;
  std::uint64_t universe_bound = 0;  // max element id + 1, observed

  double avg_set_size() const {
    return num_sets == 0 ? 0.0 : static_cast<double>(total_elements) / static_cast<double>(num_sets);
  }
};

struct SizeDist {
  enum class Kind { Uniform, Zipf };
  Kind kind = Kind::Uniform;
  std::uint64_t lo = 1, hi = 1;  // uniform, inclusive
  double zipf_s = 1.0;           // zipf exponent over sizes [1, zipf_max]
  std::uint64_t zipf_max = 1;
};

struct SyntheticSpec {
  std::uint64_t universe = 1;  // n: element ids drawn from [0, universe)
  std::uint64_t num_sets = 1;  // m
  SizeDist sizes;
  std::uint64_t seed = 0;

  void validate() const {
    if (universe < 1 || num_sets < 1)
      throw std::invalid_argument("synthetic spec: universe and set count must be >= 1");
    if (sizes.kind == SizeDist::Kind::Uniform) {
      if (sizes.lo < 1 || sizes.lo > sizes.hi || sizes.hi > universe)
        throw std::invalid_argument("synthetic spec: need 1 <= lo <= hi <= universe for uniform sizes");
    } else {
      if (!(sizes.zipf_s > 0.0) || sizes.zipf_max < 1 || sizes.zipf_max > universe)
        throw std::invalid_argument("synthetic spec: need s > 0 and 1 <= max <= universe for zipf sizes");
    }
  }
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t lineno, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

struct FimiSource {
  std::string path;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    SetRecord rec;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t lineno = 0;
    std::size_t index = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      rec.elements.clear();
      seen.clear();
      const char* p = line.data();
      const char* end = p + line.size();
      while (p != end) {
        if (*p == ' ' || *p == '\t') {
          ++p;
          continue;
        }
        std::uint64_t value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec == std::errc::result_out_of_range)
          parse_fail(path, lineno, "element id out of 64-bit range");
        if (ec != std::errc{} || (next != end && *next != ' ' && *next != '\t')) {
          const char* tok_end = next;
          while (tok_end != end && *tok_end != ' ' && *tok_end != '\t') ++tok_end;
          parse_fail(path, lineno, "invalid token '" + std::string(p, tok_end) + "'");
        }
        p = next;
        if (seen.insert(value).second) rec.elements.push_back(value);
      }
      if (rec.elements.empty()) continue;  // blank line
      rec.index = index++;
      fn(static_cast<const SetRecord&>(rec));
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
  }
};

struct SynthSource {
  SyntheticSpec spec;
  // Cumulative zipf weights over sizes 1..zipf_max; empty for uniform sizes.
  std::shared_ptr<const std::vector<double>> zipf_cdf;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    SplitMix64 rng(spec.seed);
    SetRecord rec;
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < spec.num_sets; ++i) {
      const std::uint64_t size = draw_size(rng);
      rec.elements.clear();
      seen.clear();
      while (rec.elements.size() < size) {
        const std::uint64_t id = rng.next_below(spec.universe);
        if (seen.insert(id).second) rec.elements.push_back(id);
      }
      rec.index = static_cast<std::size_t>(i);
      fn(static_cast<const SetRecord&>(rec));
    }
  }

  std::uint64_t draw_size(SplitMix64& rng) const {
    if (spec.sizes.kind == SizeDist::Kind::Uniform)
      return spec.sizes.lo + rng.next_below(spec.sizes.hi - spec.sizes.lo + 1);
    const auto& cdf = *zipf_cdf;
    const double u = rng.next_unit() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::uint64_t>(it - cdf.begin()) + 1;
  }
};

struct MemorySource {
  std::shared_ptr<const std::vector<std::vector<std::uint64_t>>> sets;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    SetRecord rec;
    for (std::size_t i = 0; i < sets->size(); ++i) {
      rec.index = i;
      rec.elements = (*sets)[i];
      fn(static_cast<const SetRecord&>(rec));
    }
  }
};

}  // namespace detail

// A re-iterable source of sets. Every pass replays the identical sequence:
// files are re-read, synthetic streams are regenerated from their seed.
class SetStream {
 public:
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::visit([&](const auto& src) { src.for_each(fn); }, source_);
  }

  // Exact m, max set size, total element instances and observed universe
  // bound. Costs one pass on first call, cached afterwards.
  const StreamStats& stats() {
    if (!stats_) {
      StreamStats s;
      for_each([&](const SetRecord& rec) {
        ++s.num_sets;
        s.max_set_size = std::max(s.max_set_size, rec.elements.size());
        s.total_elements += rec.elements.size();
        for (std::uint64_t e : rec.elements) s.universe_bound = std::max(s.universe_bound, e + 1);
      });
      if (s.num_sets == 0) throw std::runtime_error("empty stream: " + description_);
    stats_ = s;
    }
    return *stats_;
  }

  bool has_stats() const { return stats_.has_value(); }
  const std::string& describe() const { return description_; }

  static SetStream from_fimi(std::string path) {
    SetStream s;
    s.description_ = path;
    s.source_ = detail::FimiSource{std::move(path)};
    return s;
  }

  static SetStream synthetic(const SyntheticSpec& spec) {
    spec.validate();
    detail::SynthSource src{spec, nullptr};
    if (spec.sizes.kind == SizeDist::Kind::Zipf) {
      auto cdf = std::make_shared<std::vector<double>>();
      cdf->reserve(spec.sizes.zipf_max);
      double acc = 0.0;
      for (std::uint64_t j = 1; j <= spec.sizes.zipf_max; ++j) {
        acc += std::pow(static_cast<double>(j), -spec.sizes.zipf_s);
        cdf->push_back(acc);
      }
      src.zipf_cdf = std::move(cdf);
    }
    SetStream s;
    s.description_ = describe_synth(spec);
    s.source_ = std::move(src);
    return s;
  }

  static SetStream from_sets(std::vector<std::vector<std::uint64_t>> sets, std::string description = "memory") {
    SetStream s;
    s.description_ = std::move(description);
    s.source_ = detail::MemorySource{
        std::make_shared<const std::vector<std::vector<std::uint64_t>>>(std::move(sets))};
    return s;
  }

 private:
  static std::string describe_synth(const SyntheticSpec& spec) {
    std::ostringstream d;
    d << "synth:n=" << spec.universe << ",m=" << spec.num_sets;
    if (spec.sizes.kind == SizeDist::Kind::Uniform) {
      d << ",sizes=uniform(" << spec.sizes.lo << "," << spec.sizes.hi << ")";
    } else {
      d << ",sizes=zipf(" << spec.sizes.zipf_s << "," << spec.sizes.zipf_max << ")";
    }
    d << ",seed=" << spec.seed;
    return d.str();
  }

  std::variant<detail::FimiSource, detail::SynthSource, detail::MemorySource> source_;
  std::optional<StreamStats> stats_;
  std::string description_;
};

// One set per line, ids space-separated. Empty sets are not representable
// (a blank line is skipped on parse), so callers must not pass them.
inline void write_fimi(const SetStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  stream.for_each([&](const SetRecord& rec) {
    if (rec.elements.empty()) throw std::runtime_error("cannot serialize an empty set to FIMI text");
    for (std::size_t i = 0; i < rec.elements.size(); ++i) {
      if (i) out << ' ';
      out << rec.elements[i];
    }
    out << '\n';
  });
  if (!out) throw std::runtime_error("I/O error while writing " + path);
}

// Snapshot the stream into memory; passes become cheap iteration. Intended
// for repeated-run experiments on streams that fit in RAM.
inline SetStream materialize(const SetStream& stream) {
  std::vector<std::vector<std::uint64_t>> sets;
  stream.for_each([&](const SetRecord& rec) { sets.push_back(rec.elements); });
  return SetStream::from_sets(std::move(sets), stream.describe());
}

}  // namespace streamcover
