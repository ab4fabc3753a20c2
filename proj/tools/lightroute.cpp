// Command-line driver: parameter sweeps, summaries and aux-graph dumps.
//
// Exit codes: 0 success, 1 configuration or input error, 2 invariant violation.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lightroute/lightroute.hpp"

namespace lr = lightroute;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw lr::ConfigError("cannot write " + path);
  return os;
}

int cmd_simulate(const std::string& config_path, const std::string& output, std::optional<std::uint64_t> seed,
                 const std::string& algorithm, const std::string& trace_path, bool wallclock) {
  auto cfg = lr::load_experiment_config(config_path);
  if (seed) cfg.base_seed = *seed;
  if (!algorithm.empty()) {
    auto alg = lr::parse_algorithm(algorithm);
    if (!alg) throw lr::ConfigError("unknown algorithm '" + algorithm + "'");
    cfg.algorithms = {*alg};
  }
  if (wallclock) cfg.record_wallclock = true;
  const auto topo = lr::parse_topology(lr::read_file(cfg.topology_path));

  std::unique_ptr<std::ofstream> trace;
  lr::SweepHooks hooks;
  if (!trace_path.empty()) {
    trace = std::make_unique<std::ofstream>(open_output(trace_path));
    hooks.trace = trace.get();
  }
  const auto rows = lr::run_sweep(cfg, topo, hooks);
  auto os = open_output(output);
  lr::write_sweep_csv(os, rows);
  return 0;
}

int cmd_summarize(const std::string& input, const std::string& output) {
  const auto rows = lr::parse_sweep_csv(lr::read_file(input));
  if (rows.empty()) throw lr::ConfigError("no rows in " + input);
  auto os = open_output(output);
  lr::write_summary_csv(os, lr::summarize(rows));
  return 0;
}

int cmd_graph(const std::string& topology_path, const std::string& source, const std::string& destination,
              const std::string& output) {
  auto topo = lr::parse_topology(lr::read_file(topology_path));
  topo.set_mode(lr::ConversionMode::share_per_node);
  auto s = topo.find_router(source);
  auto d = topo.find_router(destination);
  if (!s || !d) throw lr::ConfigError("unknown router label");
  // A fresh simulator supplies an idle network with prior statistics.
  lr::Simulator sim(topo, lr::SimulationConfig{}, lr::Algorithm::mrpr, 0);
  const auto aux = lr::build_spn_graph(sim.context(), *s, *d);
  const auto dot = lr::to_dot(aux, topo);
  if (output.empty()) {
    std::cout << dot;
  } else {
    auto os = open_output(output);
    os << dot;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-aware lightpath routing simulator"};
  app.require_subcommand(1);

  std::string config_path, output, algorithm, trace_path;
  std::optional<std::uint64_t> seed;
  bool wallclock = false;
  auto* sim = app.add_subcommand("simulate", "Run the configured sweep and write one CSV row per run");
  sim->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--output", output, "Sweep CSV to write")->required();
  sim->add_option("--seed", seed, "Override the base seed");
  sim->add_option("--algorithm", algorithm, "Run only this algorithm")->check(CLI::IsMember({"mrpr", "aur", "llr"}));
  sim->add_option("--trace", trace_path, "Write an event trace to this file");
  sim->add_flag("--wallclock", wallclock, "Record run time in wallclock_s (makes output nondeterministic)");

  std::string input, summary_out;
  auto* sum = app.add_subcommand("summarize", "Per-point mean and standard error of a sweep CSV");
  sum->add_option("--input", input, "Sweep CSV")->required()->check(CLI::ExistingFile);
  sum->add_option("--output", summary_out, "Summary CSV to write")->required();

  std::string topo_path, src, dst, dot_out;
  auto* graph = app.add_subcommand("graph", "Dump the share-per-node auxiliary graph in DOT format");
  graph->add_option("--topology", topo_path, "Topology file")->required()->check(CLI::ExistingFile);
  graph->add_option("--source", src, "Source router label")->required();
  graph->add_option("--destination", dst, "Destination router label")->required();
  graph->add_option("--output", dot_out, "DOT file to write (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config_path, output, seed, algorithm, trace_path, wallclock);
    if (*sum) return cmd_summarize(input, summary_out);
    if (*graph) return cmd_graph(topo_path, src, dst, dot_out);
  } catch (const lr::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
