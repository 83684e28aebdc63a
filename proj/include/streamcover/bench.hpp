#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "streamcover/baselines.hpp"
#include "streamcover/mach.hpp"
#include "streamcover/set_stream.hpp"

namespace streamcover {

// ---------------------------------------------------------------------------
// Dataset descriptors: either a file path (FIMI text) or
// "synth:n=...,m=...,sizes=uniform(a,b)|zipf(s,max),seed=...".
// ---------------------------------------------------------------------------

inline SyntheticSpec parse_synth_descriptor(const std::string& body) {
  SyntheticSpec spec;
  bool have_n = false, have_m = false, have_sizes = false;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t eq = body.find('=', pos);
    if (eq == std::string::npos) throw std::invalid_argument("synthetic descriptor: expected key=value in '" + body + "'");
    const std::string key = body.substr(pos, eq - pos);
    std::size_t end = eq + 1;
    int depth = 0;
    while (end < body.size() && (body[end] != ',' || depth > 0)) {
      if (body[end] == '(') ++depth;
      if (body[end] == ')') --depth;
      ++end;
    }
    const std::string value = body.substr(eq + 1, end - eq - 1);
    try {
      if (key == "n") {
        spec.universe = std::stoull(value);
        have_n = true;
      } else if (key == "m") {
        spec.num_sets = std::stoull(value);
        have_m = true;
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "sizes") {
        const std::size_t open = value.find('(');
        const std::size_t close = value.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
          throw std::invalid_argument("bad sizes");
        const std::string name = value.substr(0, open);
        const std::string args = value.substr(open + 1, close - open - 1);
        const std::size_t comma = args.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad sizes");
        if (name == "uniform") {
          spec.sizes.kind = SizeDist::Kind::Uniform;
          spec.sizes.lo = std::stoull(args.substr(0, comma));
          spec.sizes.hi = std::stoull(args.substr(comma + 1));
        } else if (name == "zipf") {
          spec.sizes.kind = SizeDist::Kind::Zipf;
          spec.sizes.zipf_s = std::stod(args.substr(0, comma));
          spec.sizes.zipf_max = std::stoull(args.substr(comma + 1));
        } else {
          throw std::invalid_argument("bad sizes");
        }
        have_sizes = true;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("synthetic descriptor: cannot parse '" + key + "=" + value + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("synthetic descriptor: value out of range in '" + key + "=" + value + "'");
    }
    pos = end + (end < body.size() ? 1 : 0);
  }
  if (!have_n || !have_m || !have_sizes)
    throw std::invalid_argument("synthetic descriptor needs n=, m= and sizes=");
  spec.validate();
  return spec;
}

inline SetStream open_dataset(const std::string& descriptor) {
  if (descriptor.rfind("synth:", 0) == 0)
    return SetStream::synthetic(parse_synth_descriptor(descriptor.substr(6)));
  return SetStream::from_fimi(descriptor);
}

// ---------------------------------------------------------------------------
// Algorithm tokens: greedy | sg | bmkk | 2p | mach-<gamma>[-f0]
// ---------------------------------------------------------------------------

enum class AlgoKind { Greedy, SG, BMKK, TwoPass, Mach };

struct AlgoSpec {
  AlgoKind kind = AlgoKind::Greedy;
  GammaMode gamma = GammaMode::Pairwise;
  bool f0_selection = false;

  bool uses_eps() const { return kind == AlgoKind::BMKK || kind == AlgoKind::TwoPass || kind == AlgoKind::Mach; }
  bool uses_seed() const { return kind == AlgoKind::Mach; }

  std::string name() const {
    switch (kind) {
      case AlgoKind::Greedy: return "greedy";
      case AlgoKind::SG: return "sg";
      case AlgoKind::BMKK: return "bmkk";
      case AlgoKind::TwoPass: return "2p";
      case AlgoKind::Mach: return "mach";
    }
    return "?";
  }
};

inline AlgoSpec parse_algo_token(const std::string& token) {
  AlgoSpec spec;
  if (token == "greedy") {
    spec.kind = AlgoKind::Greedy;
  } else if (token == "sg") {
    spec.kind = AlgoKind::SG;
  } else if (token == "bmkk") {
    spec.kind = AlgoKind::BMKK;
  } else if (token == "2p") {
    spec.kind = AlgoKind::TwoPass;
  } else if (token.rfind("mach-", 0) == 0) {
    spec.kind = AlgoKind::Mach;
    std::string rest = token.substr(5);
    if (rest.size() > 3 && rest.substr(rest.size() - 3) == "-f0") {
      spec.f0_selection = true;
      rest = rest.substr(0, rest.size() - 3);
    }
    spec.gamma = parse_gamma_mode(rest);
  } else {
    throw std::invalid_argument("unknown algorithm name: " + token);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Result rows and report emission.
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string dataset;
  std::string algo;
  std::string gamma_mode;  // empty for non-subsampling algorithms
  std::size_t k = 0;
  std::optional<double> eps;
  std::optional<double> c;
  std::optional<std::uint64_t> seed;
  std::uint64_t coverage = 0;
  std::optional<double> coverage_rel_greedy;
  int passes = 0;
  std::uint64_t peak_elements = 0;
  std::uint64_t hash_mulmod = 0;
  double wall_ms = 0.0;
  std::optional<std::uint64_t> selected_guess;
  std::size_t solution_size = 0;
  std::vector<std::string> flags;
};

inline constexpr const char* kCsvHeader =
    "dataset,algo,gamma_mode,k,eps,c,seed,coverage,coverage_rel_greedy,passes,peak_elements,"
    "hash_mulmod,wall_ms,selected_guess,solution_size,flags";

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string fmt_double(double v, int precision) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

inline std::string fmt_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

}  // namespace detail

inline std::string to_csv(const ResultRow& r) {
  std::ostringstream os;
  os << detail::csv_quote(r.dataset) << ',' << r.algo << ',' << r.gamma_mode << ',' << r.k << ',';
  if (r.eps) os << detail::fmt_param(*r.eps);
  os << ',';
  if (r.c) os << detail::fmt_param(*r.c);
  os << ',';
  if (r.seed) os << *r.seed;
  os << ',' << r.coverage << ',';
  if (r.coverage_rel_greedy) os << detail::fmt_double(*r.coverage_rel_greedy, 6);
  os << ',' << r.passes << ',' << r.peak_elements << ',' << r.hash_mulmod << ','
     << detail::fmt_double(r.wall_ms, 3) << ',';
  if (r.selected_guess) os << *r.selected_guess;
  os << ',' << r.solution_size << ',' << detail::join_flags(r.flags);
  return os.str();
}

inline nlohmann::json to_json(const ResultRow& r) {
  nlohmann::json j;
  j["dataset"] = r.dataset;
  j["algo"] = r.algo;
  j["gamma_mode"] = r.gamma_mode;
  j["k"] = r.k;
  j["eps"] = r.eps ? nlohmann::json(*r.eps) : nlohmann::json(nullptr);
  j["c"] = r.c ? nlohmann::json(*r.c) : nlohmann::json(nullptr);
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  j["coverage"] = r.coverage;
  j["coverage_rel_greedy"] =
      r.coverage_rel_greedy ? nlohmann::json(*r.coverage_rel_greedy) : nlohmann::json(nullptr);
  j["passes"] = r.passes;
  j["peak_elements"] = r.peak_elements;
  j["hash_mulmod"] = r.hash_mulmod;
  j["wall_ms"] = r.wall_ms;
  j["selected_guess"] = r.selected_guess ? nlohmann::json(*r.selected_guess) : nlohmann::json(nullptr);
  j["solution_size"] = r.solution_size;
  j["flags"] = r.flags;
  return j;
}

// Writes <out_base>.csv and <out_base>.json.
inline void emit_report(const std::vector<ResultRow>& rows, const std::string& out_base) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
  std::ofstream csv(out_base + ".csv");
  if (!csv) throw std::runtime_error("cannot write " + out_base + ".csv");
  csv << kCsvHeader << '\n';
  for (const auto& r : rows) csv << to_csv(r) << '\n';
  if (!csv) throw std::runtime_error("I/O error writing " + out_base + ".csv");

  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(to_json(r));
  std::ofstream json_out(out_base + ".json");
  if (!json_out) throw std::runtime_error("cannot write " + out_base + ".json");
  json_out << j.dump(2) << '\n';
  if (!json_out) throw std::runtime_error("I/O error writing " + out_base + ".json");
}

// ---------------------------------------------------------------------------
// Experiment grids.
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  std::string dataset;
  std::vector<std::string> algos;
  std::vector<std::size_t> ks;
  std::vector<double> epss;
  double c = 1.0;
  int repetitions = 1;
  std::uint64_t seed_base = 0;
  std::string out = "results";
  double time_limit_s = 0.0;  // 0: no limit
  bool in_memory = false;     // snapshot the dataset before running

  void validate() const {
    if (dataset.empty()) throw std::invalid_argument("experiment: dataset is required");
    if (algos.empty() || ks.empty()) throw std::invalid_argument("experiment: algos and k grids must be nonempty");
    if (repetitions < 1) throw std::invalid_argument("experiment: repetitions must be >= 1");
    bool needs_eps = false;
    for (const auto& a : algos) needs_eps = needs_eps || parse_algo_token(a).uses_eps();
    if (needs_eps && epss.empty()) throw std::invalid_argument("experiment: eps grid must be nonempty");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = trim(s.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

// key = value lines; '#' starts a comment; list values are comma-separated.
inline ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "dataset") {
      spec.dataset = value;
    } else if (key == "algos") {
      spec.algos = detail::split_list(value);
    } else if (key == "k") {
      for (const auto& t : detail::split_list(value)) spec.ks.push_back(std::stoull(t));
    } else if (key == "eps") {
      for (const auto& t : detail::split_list(value)) spec.epss.push_back(std::stod(t));
    } else if (key == "c") {
      spec.c = std::stod(value);
    } else if (key == "reps") {
      spec.repetitions = std::stoi(value);
    } else if (key == "seed_base") {
      spec.seed_base = std::stoull(value);
    } else if (key == "out") {
      spec.out = value;
    } else if (key == "time_limit_s") {
      spec.time_limit_s = std::stod(value);
    } else if (key == "in_memory") {
      spec.in_memory = value == "true" || value == "1";
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  for (const auto& a : spec.algos) (void)parse_algo_token(a);  // fail fast on bad names
  return spec;
}

inline ExperimentSpec parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_experiment_config(in);
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// Run one algorithm configuration and package the row. `greedy_coverage` is
// the reference for the quality ratio; pass nullopt when unavailable.
inline ResultRow execute_single(SetStream& stream, const std::string& dataset_desc,
                                const AlgoSpec& algo, std::size_t k, double eps, double c,
                                std::uint64_t seed, std::optional<std::uint64_t> greedy_coverage,
                                std::optional<std::uint64_t> universe_bound = std::nullopt) {
  ResultRow row;
  row.dataset = dataset_desc;
  row.algo = algo.name();
  row.k = k;
  if (algo.uses_eps()) row.eps = eps;
  if (algo.kind == AlgoKind::Mach) {
    row.gamma_mode = to_string(algo.gamma);
    row.c = c;
    row.seed = seed;
  }

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  switch (algo.kind) {
    case AlgoKind::Greedy: result = run_greedy(stream, k); break;
    case AlgoKind::SG: result = run_sg(stream, k); break;
    case AlgoKind::BMKK: result = run_bmkk(stream, k, eps); break;
    case AlgoKind::TwoPass: result = run_2p(stream, k, eps); break;
    case AlgoKind::Mach: {
      MachParams p;
      p.k = k;
      p.eps = eps;
      p.c = c;
      p.gamma_mode = algo.gamma;
      p.seed = seed;
      p.use_f0_selection = algo.f0_selection;
      p.universe_bound_override = universe_bound;
      result = run_mach(stream, p);
      break;
    }
  }
  row.wall_ms = detail::elapsed_ms(start);

  row.coverage = result.coverage;
  row.passes = result.passes;
  row.peak_elements = result.peak_elements;
  row.hash_mulmod = result.hash_mulmods;
  row.solution_size = result.solution.size();
  if (algo.kind != AlgoKind::Greedy && algo.kind != AlgoKind::SG && result.selected_guess > 0)
    row.selected_guess = result.selected_guess;
  if (result.scored_by_extra_pass) row.flags.push_back("eval_pass=1");
  if (algo.f0_selection) row.flags.push_back("f0_selection");
  if (result.solution.size() < k) row.flags.push_back("short_solution");
  if (result.no_qualifying_guess) row.flags.push_back("no_qualifying_guess");

  if (algo.kind == AlgoKind::Greedy) {
    row.coverage_rel_greedy = 1.0;
  } else if (greedy_coverage && *greedy_coverage > 0) {
    const double ratio = static_cast<double>(result.coverage) / static_cast<double>(*greedy_coverage);
    row.coverage_rel_greedy = ratio;
    if (row.eps) {
      const double admissible = 1.0 - delta_eps(*row.eps) / (1.0 - 1.0 / std::numbers::e);
      if (ratio < admissible) row.flags.push_back("below_admissible");
    }
  }
  return row;
}

// Full grid: algos x k x eps x repetitions, rows appended to <out>.csv as they
// finish. The greedy reference is computed once per k and shared by every
// ratio in that column.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                             std::ostream* progress = nullptr) {
  spec.validate();
  SetStream stream = open_dataset(spec.dataset);
  if (spec.in_memory) stream = materialize(stream);
  (void)stream.stats();

  std::ofstream csv(spec.out + ".csv");
  if (!csv) throw std::runtime_error("cannot write " + spec.out + ".csv");
  csv << kCsvHeader << '\n' << std::flush;

  std::map<std::size_t, std::uint64_t> greedy_ref;
  auto reference = [&](std::size_t k) {
    auto it = greedy_ref.find(k);
    if (it == greedy_ref.end()) {
      if (progress) *progress << "# greedy reference, k=" << k << '\n';
      it = greedy_ref.emplace(k, run_greedy(stream, k).coverage).first;
    }
    return it->second;
  };

  std::vector<ResultRow> rows;
  for (const auto& token : spec.algos) {
    const AlgoSpec algo = parse_algo_token(token);
    for (std::size_t k : spec.ks) {
      const std::uint64_t ref = reference(k);
      const std::vector<double> eps_grid = algo.uses_eps() ? spec.epss : std::vector<double>{0.0};
      for (double eps : eps_grid) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
          const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(rep);
          ResultRow row = execute_single(stream, spec.dataset, algo, k, eps, spec.c, seed, ref);
          if (!algo.uses_seed()) row.seed.reset();
          if (spec.time_limit_s > 0 && row.wall_ms > spec.time_limit_s * 1000.0)
            row.flags.push_back("timed_out");
          csv << to_csv(row) << '\n' << std::flush;
          rows.push_back(std::move(row));
          if (progress)
            *progress << token << " k=" << k << " eps=" << eps << " rep=" << rep << " done\n";
        }
      }
    }
  }

  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(to_json(r));
  std::ofstream json_out(spec.out + ".json");
  if (!json_out) throw std::runtime_error("cannot write " + spec.out + ".json");
  json_out << j.dump(2) << '\n';
  return rows;
}

}  // namespace streamcover
