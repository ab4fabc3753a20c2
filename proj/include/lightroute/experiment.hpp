#pragma once

// Parameter sweeps over load and reliability ratio, the key-value config
// format, CSV output and per-point summaries.
//
// Config file: one `key = value` per line, `#` comments. Lists are
// comma-separated. See README.md for every key.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include "lightroute/errors.hpp"
#include "lightroute/rng.hpp"
#include "lightroute/routing.hpp"
#include "lightroute/simulator.hpp"
#include "lightroute/topology.hpp"

namespace lightroute {

enum class ReliabilityPool { routers_and_links, routers_only };

struct ExperimentConfig {
  std::string topology_path;
  std::vector<Algorithm> algorithms{Algorithm::mrpr, Algorithm::aur, Algorithm::llr};
  std::vector<double> loads{4.0};               // lambda_T values
  std::vector<double> reliability_ratios{0.05356};
  std::uint32_t replications = 10;
  std::uint64_t base_seed = 1;
  std::optional<ConversionMode> mode;           // overrides the topology file when set
  ReliabilityPool reliability_pool = ReliabilityPool::routers_and_links;
  bool record_wallclock = false;
  SimulationConfig sim{};

  void validate() const {
    if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
    if (loads.empty()) throw ConfigError("loads must not be empty");
    if (reliability_ratios.empty()) throw ConfigError("reliability_ratios must not be empty");
    if (replications == 0) throw ConfigError("replications must be >= 1");
    for (double l : loads)
      if (!(l > 0.0) || std::isinf(l)) throw ConfigError("loads must be positive");
    for (double r : reliability_ratios)
      if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("reliability ratios must be in [0,1]");
    SimulationConfig probe = sim;
    probe.arrival_rate = loads.front();
    probe.validate();
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("invalid number for " + std::string(key) + ": '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("invalid integer for " + std::string(key) + ": '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = v.find(',');
    auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InvariantViolation("format_double failed");
  return std::string(buf, p);
}

}  // namespace detail

/// Parses the key-value config. A relative topology path resolves against `base_dir`.
inline ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  using detail::parse_double;
  using detail::parse_uint;
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    auto enum_error = [&] { return ConfigError("line " + std::to_string(line_no) + ": invalid value for " + key); };

    if (key == "topology") {
      std::filesystem::path p{std::string(value)};
      cfg.topology_path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (auto a : detail::split_list(value)) {
        auto alg = parse_algorithm(a);
        if (!alg) throw enum_error();
        cfg.algorithms.push_back(*alg);
      }
    } else if (key == "loads") {
      cfg.loads.clear();
      for (auto v : detail::split_list(value)) cfg.loads.push_back(parse_double(key, v));
    } else if (key == "reliability_ratios") {
      cfg.reliability_ratios.clear();
      for (auto v : detail::split_list(value)) cfg.reliability_ratios.push_back(parse_double(key, v));
    } else if (key == "replications") {
      cfg.replications = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "seed") {
      cfg.base_seed = parse_uint(key, value);
    } else if (key == "mode") {
      if (value == "wi") cfg.mode = ConversionMode::full_conversion;
      else if (value == "spn") cfg.mode = ConversionMode::share_per_node;
      else throw enum_error();
    } else if (key == "reliability_pool") {
      if (value == "routers_and_links") cfg.reliability_pool = ReliabilityPool::routers_and_links;
      else if (value == "routers") cfg.reliability_pool = ReliabilityPool::routers_only;
      else throw enum_error();
    } else if (key == "record_wallclock") {
      cfg.record_wallclock = detail::parse_bool(key, value);
    } else if (key == "requests") {
      cfg.sim.requests = parse_uint(key, value);
    } else if (key == "mean_holding") {
      cfg.sim.mean_holding = parse_double(key, value);
    } else if (key == "warmup_fraction") {
      cfg.sim.warmup_fraction = parse_double(key, value);
    } else if (key == "failure_rate_reliable") {
      cfg.sim.failures.reliable = parse_double(key, value);
    } else if (key == "failure_rate_unreliable") {
      cfg.sim.failures.unreliable = parse_double(key, value);
    } else if (key == "swap_failure_rates") {
      cfg.sim.failures.swap = detail::parse_bool(key, value);
    } else if (key == "wavelength_policy") {
      if (value == "first_fit") cfg.sim.routing.wavelength_policy = WavelengthPolicy::first_fit;
      else if (value == "random") cfg.sim.routing.wavelength_policy = WavelengthPolicy::random;
      else throw enum_error();
    } else if (key == "tie_break") {
      if (value == "lexicographic") cfg.sim.routing.tie_break = TieBreak::lexicographic;
      else if (value == "random") cfg.sim.routing.tie_break = TieBreak::random;
      else throw enum_error();
    } else if (key == "estimator") {
      if (value == "meanvar") cfg.sim.estimator.kind = EstimatorKind::mean_var;
      else if (value == "kalman") cfg.sim.estimator.kind = EstimatorKind::kalman;
      else throw enum_error();
    } else if (key == "kalman_q") {
      cfg.sim.estimator.kalman_q = parse_double(key, value);
    } else if (key == "kalman_r") {
      cfg.sim.estimator.kalman_r = parse_double(key, value);
    } else if (key == "scan_interval") {
      cfg.sim.scan_interval = parse_double(key, value);
    } else if (key == "scan_window") {
      cfg.sim.scan_window = parse_uint(key, value);
    } else if (key == "repack_threshold") {
      cfg.sim.cost.repack_threshold = parse_double(key, value);
    } else if (key == "failure_model") {
      if (value == "tchebycheff") cfg.sim.cost.failure_model = FailureModel::tchebycheff;
      else if (value == "exponential") cfg.sim.cost.failure_model = FailureModel::exponential;
      else throw enum_error();
    } else if (key == "link_repacking") {
      if (value == "none") cfg.sim.cost.link_repacking = LinkRepacking::none;
      else if (value == "erlang") cfg.sim.cost.link_repacking = LinkRepacking::erlang;
      else throw enum_error();
    } else if (key == "llr_exhaustive_limit") {
      cfg.sim.routing.llr_exhaustive_limit = parse_uint(key, value);
    } else if (key == "llr_candidates") {
      cfg.sim.routing.llr_candidates = parse_uint(key, value);
    } else if (key == "check_invariants") {
      cfg.sim.check_invariants = detail::parse_bool(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.topology_path.empty()) throw ConfigError("missing required key 'topology'");
  cfg.validate();
  return cfg;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

/// Marks ceil(ratio x pool size) elements unreliable, chosen uniformly with a
/// seeded partial shuffle; every other element becomes reliable.
inline Topology assign_reliability_classes(Topology topo, double ratio, std::uint64_t seed,
                                           ReliabilityPool pool = ReliabilityPool::routers_and_links) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("reliability ratio must be in [0,1]");
  std::vector<ElementRef> elements;
  for (const auto& r : topo.routers()) elements.push_back(ElementRef::of(r.id));
  if (pool == ReliabilityPool::routers_and_links)
    for (const auto& l : topo.links()) elements.push_back(ElementRef::of(l.id));
  for (const auto& r : topo.routers()) topo.set_router_class(r.id, ReliabilityClass::reliable);
  for (const auto& l : topo.links()) topo.set_link_class(l.id, ReliabilityClass::reliable);

  // The small slack keeps products like 0.1 * 10 from rounding up.
  const double scaled = ratio * static_cast<double>(elements.size());
  auto count = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  count = std::min(count, elements.size());

  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.index(elements.size() - i);
    std::swap(elements[i], elements[j]);
    const auto e = elements[i];
    if (e.kind == ElementRef::Kind::router)
      topo.set_router_class(RouterId{e.index}, ReliabilityClass::unreliable);
    else
      topo.set_link_class(LinkId{e.index}, ReliabilityClass::unreliable);
  }
  return topo;
}

struct SweepRow {
  Algorithm algorithm = Algorithm::mrpr;
  double lambda_total = 0.0;
  double load_per_wavelength = 0.0;
  double reliability_ratio = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t offered = 0;
  std::uint64_t blocked = 0;
  std::uint64_t accepted = 0;
  std::uint64_t reconfig_events = 0;
  double blocking_prob = 0.0;
  double reconfig_prob = 0.0;
  double wallclock_s = 0.0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

using SweepResult = std::vector<SweepRow>;

inline constexpr std::string_view kSweepCsvHeader =
    "algorithm,lambda_T,load_per_wavelength,reliability_ratio,seed,offered,blocked,accepted,reconfig_events,"
    "blocking_prob,reconfig_prob,wallclock_s";

/// Replication seed for (load index, ratio index, replication). Shared by
/// all algorithms so they see common random numbers.
inline std::uint64_t replication_seed(std::uint64_t base, std::size_t grid_index, std::uint32_t replication) {
  return derive_seed(base, 0x67726964ULL + grid_index, replication);
}

/// Seed for drawing reliability classes; fixed across loads and algorithms.
inline std::uint64_t class_seed(std::uint64_t base, std::size_t ratio_index, std::uint32_t replication) {
  return derive_seed(base, 0x636c617373ULL + ratio_index, replication, 1);
}

struct SweepHooks {
  std::ostream* trace = nullptr;
  std::function<void(const SweepRow&, const Simulator&)> on_run;
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs every (load, ratio, algorithm, replication) in that nesting order.
inline SweepResult run_sweep(const ExperimentConfig& cfg, const Topology& base_topology, const SweepHooks& hooks = {}) {
  cfg.validate();
  Topology topo = base_topology;
  if (cfg.mode) topo.set_mode(*cfg.mode);

  const std::size_t n_ratio = cfg.reliability_ratios.size();
  std::set<std::uint64_t> seeds;
  for (std::size_t g = 0; g < cfg.loads.size() * n_ratio; ++g)
    for (std::uint32_t r = 0; r < cfg.replications; ++r)
      if (!seeds.insert(replication_seed(cfg.base_seed, g, r)).second)
        throw InvariantViolation("derived seed collision");

  std::vector<std::vector<Topology>> classed(n_ratio);
  for (std::size_t ri = 0; ri < n_ratio; ++ri)
    for (std::uint32_t rep = 0; rep < cfg.replications; ++rep)
      classed[ri].push_back(assign_reliability_classes(topo, cfg.reliability_ratios[ri],
                                                       class_seed(cfg.base_seed, ri, rep), cfg.reliability_pool));

  SweepResult rows;
  rows.reserve(cfg.loads.size() * n_ratio * cfg.algorithms.size() * cfg.replications);
  for (std::size_t li = 0; li < cfg.loads.size(); ++li) {
    for (std::size_t ri = 0; ri < n_ratio; ++ri) {
      const std::size_t grid = li * n_ratio + ri;
      for (Algorithm alg : cfg.algorithms) {
        for (std::uint32_t rep = 0; rep < cfg.replications; ++rep) {
          const std::uint64_t seed = replication_seed(cfg.base_seed, grid, rep);
          SimulationConfig sc = cfg.sim;
          sc.arrival_rate = cfg.loads[li];
          const Topology& t = classed[ri][rep];
          if (hooks.trace)
            *hooks.trace << "# run algorithm=" << to_string(alg) << " lambda_T=" << detail::format_double(cfg.loads[li])
                         << " reliability_ratio=" << detail::format_double(cfg.reliability_ratios[ri])
                         << " seed=" << seed << '\n';
          const auto start = std::chrono::steady_clock::now();
          try {
            Simulator sim(t, sc, alg, seed, hooks.trace);
            const Metrics m = sim.run();
            SweepRow row;
            row.algorithm = alg;
            row.lambda_total = cfg.loads[li];
            row.load_per_wavelength = load_per_wavelength(cfg.loads[li], m.mean_hops(), t.max_wavelengths(),
                                                          std::max<std::uint32_t>(1, t.total_fibers()));
            row.reliability_ratio = cfg.reliability_ratios[ri];
            row.seed = seed;
            row.offered = m.offered;
            row.blocked = m.blocked;
            row.accepted = m.accepted;
            row.reconfig_events = m.reconfig_events;
            row.blocking_prob = m.blocking_probability();
            row.reconfig_prob = m.reconfiguration_probability();
            if (cfg.record_wallclock)
              row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (hooks.on_run) hooks.on_run(row, sim);
            rows.push_back(row);
          } catch (const InvariantViolation& e) {
            throw InvariantViolation(std::string(e.what()) + " [algorithm=" + std::string(to_string(alg)) +
                                     " lambda_T=" + detail::format_double(cfg.loads[li]) + " reliability_ratio=" +
                                     detail::format_double(cfg.reliability_ratios[ri]) +
                                     " replication=" + std::to_string(rep) + "]");
          }
        }
      }
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& rows) {
  using detail::format_double;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows)
    os << to_string(r.algorithm) << ',' << format_double(r.lambda_total) << ',' << format_double(r.load_per_wavelength)
       << ',' << format_double(r.reliability_ratio) << ',' << r.seed << ',' << r.offered << ',' << r.blocked << ','
       << r.accepted << ',' << r.reconfig_events << ',' << format_double(r.blocking_prob) << ','
       << format_double(r.reconfig_prob) << ',' << format_double(r.wallclock_s) << '\n';
}

inline std::string sweep_csv(const SweepResult& rows) {
  std::ostringstream os;
  write_sweep_csv(os, rows);
  return os.str();
}

inline SweepResult parse_sweep_csv(std::string_view text) {
  using detail::parse_double;
  using detail::parse_uint;
  SweepResult rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw ConfigError("unexpected CSV header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != 12) throw ConfigError("CSV line " + std::to_string(line_no) + ": expected 12 fields");
    auto alg = parse_algorithm(f[0]);
    if (!alg) throw ConfigError("CSV line " + std::to_string(line_no) + ": unknown algorithm");
    SweepRow r;
    r.algorithm = *alg;
    r.lambda_total = parse_double("lambda_T", f[1]);
    r.load_per_wavelength = parse_double("load_per_wavelength", f[2]);
    r.reliability_ratio = parse_double("reliability_ratio", f[3]);
    r.seed = parse_uint("seed", f[4]);
    r.offered = parse_uint("offered", f[5]);
    r.blocked = parse_uint("blocked", f[6]);
    r.accepted = parse_uint("accepted", f[7]);
    r.reconfig_events = parse_uint("reconfig_events", f[8]);
    r.blocking_prob = parse_double("blocking_prob", f[9]);
    r.reconfig_prob = parse_double("reconfig_prob", f[10]);
    r.wallclock_s = parse_double("wallclock_s", f[11]);
    rows.push_back(r);
  }
  return rows;
}

/// Mean and standard error over replications; the error is empty for n = 1.
struct MeanSe {
  double mean = 0.0;
  std::optional<double> se;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

struct SummaryRow {
  Algorithm algorithm = Algorithm::mrpr;
  double lambda_total = 0.0;
  double reliability_ratio = 0.0;
  std::size_t replications = 0;
  double load_per_wavelength = 0.0;  // replication mean
  MeanSe blocking;
  MeanSe reconfig;
  // (baseline - MRPR) / baseline; empty on MRPR rows, without MRPR rows, or for a zero baseline.
  std::optional<double> mrpr_blocking_improvement;
  std::optional<double> mrpr_reconfig_improvement;
};

inline std::vector<SummaryRow> summarize(const SweepResult& rows) {
  using Key = std::tuple<int, double, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) {
    Key k{static_cast<int>(r.algorithm), r.lambda_total, r.reliability_ratio};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    std::vector<double> bp, rp, lpw;
    for (const auto* r : g) {
      bp.push_back(r->blocking_prob);
      rp.push_back(r->reconfig_prob);
      lpw.push_back(r->load_per_wavelength);
    }
    SummaryRow s;
    s.algorithm = g.front()->algorithm;
    s.lambda_total = std::get<1>(k);
    s.reliability_ratio = std::get<2>(k);
    s.replications = g.size();
    s.load_per_wavelength = mean_se(lpw).mean;
    s.blocking = mean_se(bp);
    s.reconfig = mean_se(rp);
    out.push_back(s);
  }
  for (auto& s : out) {
    if (s.algorithm == Algorithm::mrpr) continue;
    auto it = std::ranges::find_if(out, [&](const SummaryRow& m) {
      return m.algorithm == Algorithm::mrpr && m.lambda_total == s.lambda_total &&
             m.reliability_ratio == s.reliability_ratio;
    });
    if (it == out.end()) continue;
    if (s.blocking.mean > 0.0) s.mrpr_blocking_improvement = (s.blocking.mean - it->blocking.mean) / s.blocking.mean;
    if (s.reconfig.mean > 0.0) s.mrpr_reconfig_improvement = (s.reconfig.mean - it->reconfig.mean) / s.reconfig.mean;
  }
  return out;
}

inline constexpr std::string_view kSummaryCsvHeader =
    "algorithm,lambda_T,reliability_ratio,replications,load_per_wavelength,blocking_prob_mean,blocking_prob_se,"
    "reconfig_prob_mean,reconfig_prob_se,mrpr_blocking_improvement,mrpr_reconfig_improvement";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  using detail::format_double;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  os << kSummaryCsvHeader << '\n';
  for (const auto& s : rows)
    os << to_string(s.algorithm) << ',' << format_double(s.lambda_total) << ',' << format_double(s.reliability_ratio)
       << ',' << s.replications << ',' << format_double(s.load_per_wavelength) << ','
       << format_double(s.blocking.mean) << ',' << opt(s.blocking.se) << ',' << format_double(s.reconfig.mean) << ','
       << opt(s.reconfig.se) << ',' << opt(s.mrpr_blocking_improvement) << ',' << opt(s.mrpr_reconfig_improvement)
       << '\n';
}

}  // namespace lightroute
