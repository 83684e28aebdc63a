#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "streamcover/streamcover.hpp"

namespace {

int cmd_stats(const std::string& dataset) {
  streamcover::SetStream stream = streamcover::open_dataset(dataset);
  const streamcover::StreamStats& st = stream.stats();
  std::cout << "dataset:                 " << stream.describe() << '\n'
            << "sets (m):                " << st.num_sets << '\n'
            << "max set size:            " << st.max_set_size << '\n'
            << "total element instances: " << st.total_elements << '\n'
            << "observed universe bound: " << st.universe_bound << '\n'
            << "average set size:        " << std::fixed << std::setprecision(2)
            << st.avg_set_size() << '\n';
  return 0;
}

struct RunOptions {
  std::string dataset;
  std::string algo = "greedy";
  std::string gamma = "pairwise";
  bool f0_selection = false;
  std::size_t k = 1;
  double eps = 0.25;
  double c = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::uint64_t universe_bound = 0;  // 0: use the observed bound
  bool greedy_ref = false;
  bool in_memory = false;
};

int cmd_run(const RunOptions& opt) {
  streamcover::AlgoSpec algo = streamcover::parse_algo_token(
      opt.algo == "mach" ? "mach-" + opt.gamma + (opt.f0_selection ? "-f0" : "") : opt.algo);
  streamcover::SetStream stream = streamcover::open_dataset(opt.dataset);
  if (opt.in_memory) stream = streamcover::materialize(stream);

  std::optional<std::uint64_t> ref;
  if (opt.greedy_ref && algo.kind != streamcover::AlgoKind::Greedy)
    ref = streamcover::run_greedy(stream, opt.k).coverage;

  std::optional<std::uint64_t> bound;
  if (opt.universe_bound > 0) bound = opt.universe_bound;

  streamcover::ResultRow row = streamcover::execute_single(stream, stream.describe(), algo, opt.k,
                                                           opt.eps, opt.c, opt.seed, ref, bound);
  std::cout << streamcover::kCsvHeader << '\n' << streamcover::to_csv(row) << '\n';
  if (!opt.out.empty()) streamcover::emit_report({row}, opt.out);
  return 0;
}

int cmd_bench(const std::string& config_path, double time_limit_s, bool quiet) {
  streamcover::ExperimentSpec spec = streamcover::parse_experiment_config_file(config_path);
  if (time_limit_s > 0) spec.time_limit_s = time_limit_s;
  const auto rows = streamcover::run_experiment(spec, quiet ? nullptr : &std::cerr);
  std::cout << rows.size() << " rows written to " << spec.out << ".csv and " << spec.out
            << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming maximum-k-coverage algorithms and benchmark harness"};
  app.require_subcommand(1);

  std::string stats_dataset;
  CLI::App* stats = app.add_subcommand("stats", "Scan a dataset once and print its statistics");
  stats->add_option("dataset", stats_dataset, "FIMI file path or synth:<spec>")->required();

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run one algorithm configuration");
  run->add_option("--dataset", run_opt.dataset, "FIMI file path or synth:<spec>")->required();
  run->add_option("--algo", run_opt.algo, "greedy | sg | bmkk | 2p | mach")->required();
  run->add_option("--gamma", run_opt.gamma, "mach hash mode: pairwise | reduced | original | full");
  run->add_flag("--f0-selection", run_opt.f0_selection,
                "mach: select the final guess with distinct-count sketches");
  run->add_option("--k", run_opt.k, "solution size")->required();
  run->add_option("--eps", run_opt.eps, "accuracy parameter in (0, 1)");
  run->add_option("--c", run_opt.c, "space-budget constant");
  run->add_option("--seed", run_opt.seed, "random seed (mach only)");
  run->add_option("--out", run_opt.out, "write <out>.csv and <out>.json");
  run->add_option("--universe-bound", run_opt.universe_bound,
                  "declared universe bound (default: observed)");
  run->add_flag("--greedy-ref", run_opt.greedy_ref,
                "also run greedy to fill the coverage ratio column");
  run->add_flag("--in-memory", run_opt.in_memory, "snapshot the dataset before running");

  std::string bench_config;
  double bench_time_limit = 0.0;
  bool bench_quiet = false;
  CLI::App* bench = app.add_subcommand("bench", "Run an experiment grid from a config file");
  bench->add_option("--config", bench_config, "key = value config file")->required();
  bench->add_option("--time-limit", bench_time_limit,
                    "per-run wall limit in seconds; slower runs are flagged timed_out");
  bench->add_flag("--quiet", bench_quiet, "suppress progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return cmd_stats(stats_dataset);
    if (run->parsed()) return cmd_run(run_opt);
    if (bench->parsed()) return cmd_bench(bench_config, bench_time_limit, bench_quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
