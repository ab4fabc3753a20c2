#pragma once

// Discrete-event simulation of dynamic lightpath provisioning: Poisson
// requests between uniformly drawn router pairs, exponential holding times,
// Poisson failures per element, immediate rerouting of displaced
// lightpaths and periodic occupancy scans.
//
// Scans fall at k * delta and sit last among simultaneous events. Occupancy
// only changes at events, so the scans between two events are recorded as
// one batch of identical samples, capped at the window length.
//
// A failure is an instantaneous hit: lightpaths through the element are
// torn down and rerouted (in id order) with the element excluded, after
// which the element is back in service.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightroute/auxgraph.hpp"
#include "lightroute/errors.hpp"
#include "lightroute/network_state.hpp"
#include "lightroute/rng.hpp"
#include "lightroute/routing.hpp"
#include "lightroute/stats.hpp"
#include "lightroute/topology.hpp"

namespace lightroute {

struct FailureRates {
  double reliable = 1.0 / 1000.0;
  double unreliable = 1.0 / 1500.0;
  bool swap = false;

  [[nodiscard]] double rate(ReliabilityClass c) const {
    const bool unrel = (c == ReliabilityClass::unreliable) != swap;
    return unrel ? unreliable : reliable;
  }
};

struct SimulationConfig {
  double arrival_rate = 1.0;  // lambda_T, requests per unit time
  double mean_holding = 1.0;
  std::uint64_t requests = 10000;
  double warmup_fraction = 0.1;
  FailureRates failures{};
  RoutingOptions routing{};
  CostParams cost{};
  EstimatorConfig estimator{};
  std::optional<double> scan_interval;  // default 0.1 x mean holding
  std::size_t scan_window = 100;
  bool check_invariants = false;

  [[nodiscard]] double effective_scan_interval() const { return scan_interval.value_or(0.1 * mean_holding); }

  void validate() const {
    if (!(arrival_rate > 0.0) || std::isinf(arrival_rate)) throw ConfigError("arrival rate must be positive");
    if (!(mean_holding > 0.0) || std::isinf(mean_holding)) throw ConfigError("mean holding time must be positive");
    if (requests == 0) throw ConfigError("request budget must be positive");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ConfigError("warm-up fraction must be in [0,1)");
    if (!(failures.reliable >= 0.0) || !(failures.unreliable >= 0.0)) throw ConfigError("failure rates must be >= 0");
    if (!(effective_scan_interval() > 0.0)) throw ConfigError("scan interval must be positive");
    if (scan_window == 0) throw ConfigError("scan window must be positive");
    if (!(cost.repack_threshold >= 0.0 && cost.repack_threshold <= 1.0))
      throw ConfigError("repack threshold must be in [0,1]");
    if (estimator.kind == EstimatorKind::kalman && !(estimator.kalman_r > 0.0))
      throw ConfigError("kalman measurement noise r must be > 0");
    if (estimator.kind == EstimatorKind::kalman && !(estimator.kalman_q >= 0.0))
      throw ConfigError("kalman process noise q must be >= 0");
  }
};

struct Metrics {
  std::uint64_t offered = 0;
  std::uint64_t blocked = 0;
  std::uint64_t accepted = 0;
  std::uint64_t reconfig_events = 0;
  std::uint64_t reconfig_success = 0;
  std::uint64_t reconfig_dropped = 0;
  std::uint64_t total_hops = 0;  // over counted accepted lightpaths

  [[nodiscard]] double blocking_probability() const {
    return offered == 0 ? 0.0 : static_cast<double>(blocked) / static_cast<double>(offered);
  }
  [[nodiscard]] double reconfiguration_probability() const {
    return accepted == 0 ? 0.0 : static_cast<double>(reconfig_events) / static_cast<double>(accepted);
  }
  [[nodiscard]] double mean_hops() const {
    return accepted == 0 ? 0.0 : static_cast<double>(total_hops) / static_cast<double>(accepted);
  }
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// lambda = lambda_T * H / (W * L).
inline double load_per_wavelength(double lambda_total, double mean_hops, std::uint32_t wavelengths,
                                  std::uint32_t fibers) {
  if (wavelengths == 0 || fibers == 0) throw std::invalid_argument("load_per_wavelength: zero denominator");
  return lambda_total * mean_hops / (static_cast<double>(wavelengths) * static_cast<double>(fibers));
}

struct ReconfigOutcome {
  std::uint32_t hit = 0;
  std::uint32_t rerouted = 0;
  std::uint32_t dropped = 0;
};

enum class EventKind : std::uint8_t { failure = 0, departure = 1, arrival = 2, scan = 3 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::arrival;
  std::uint64_t seq = 0;
  std::uint64_t payload = 0;  // lightpath id, element code or unused

  /// Ordering for a min-heap: time, then kind priority, then sequence.
  friend bool operator>(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

class Simulator {
 public:
  Simulator(const Topology& topology, SimulationConfig config, Algorithm algorithm, std::uint64_t seed,
            std::ostream* trace = nullptr)
      : topo_(topology),
        cfg_(std::move(config)),
        algorithm_(algorithm),
        state_(topology),
        arrival_rng_(derive_seed(seed, 1)),
        holding_rng_(derive_seed(seed, 2)),
        failure_rng_(derive_seed(seed, 3)),
        routing_rng_(derive_seed(seed, 4)),
        trace_(trace) {
    cfg_.validate();
    if (topo_.router_count() < 2) throw ConfigError("topology needs at least two routers");
    cfg_.cost.mean_holding = cfg_.mean_holding;
    init_stats();
  }

  /// Runs until the request budget is exhausted.
  Metrics run() {
    schedule_arrival();
    for (std::uint32_t i = 0; i < topo_.link_count(); ++i) schedule_failure(ElementRef{ElementRef::Kind::link, i});
    for (std::uint32_t i = 0; i < topo_.router_count(); ++i)
      schedule_failure(ElementRef{ElementRef::Kind::router, i});

    while (!queue_.empty() && requests_seen_ < cfg_.requests) {
      Event ev = queue_.top();
      queue_.pop();
      scans_before(ev.time);
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::arrival: on_arrival(); break;
        case EventKind::departure: on_departure(ev.payload); break;
        case EventKind::failure: on_failure(decode(ev.payload)); break;
        case EventKind::scan: break;
      }
      if (cfg_.check_invariants) state_.check_conservation();
    }
    return metrics_;
  }

  /// Routes and, on success, establishes a request (s, d) at the current time.
  RouteDecision handle_arrival(RouterId s, RouterId d, bool counted = true) {
    const double holding = sample_exponential(holding_rng_, cfg_.mean_holding);
    return admit(s, d, holding, counted);
  }

  /// Hits `e` with a failure now: displaced lightpaths are rerouted or dropped.
  ReconfigOutcome inject_failure(ElementRef e) {
    ReconfigOutcome out;
    auto& last = e.kind == ElementRef::Kind::link ? last_link_failure_[e.index] : last_router_failure_[e.index];
    auto& est = e.kind == ElementRef::Kind::link ? stats_.link_failure_interarrival[e.index]
                                                  : stats_.router_failure_interarrival[e.index];
    est.add(now_ - last);
    last = now_;

    const auto ids = state_.lightpaths_through(e);
    std::vector<Lightpath> displaced;
    displaced.reserve(ids.size());
    for (auto id : ids) displaced.push_back(state_.release(id));

    state_.set_failed(e, true);
    for (auto& lp : displaced) {
      ++out.hit;
      const bool first_hit = lp.counted && !lp.displaced;
      lp.displaced = true;
      if (first_hit) ++metrics_.reconfig_events;
      auto decision = route(algorithm_, context(), lp.source, lp.destination, cfg_.routing, routing_rng_);
      if (decision.accepted) {
        lp.hops = std::move(decision.hops);
        lp.conversions = std::move(decision.conversions);
        state_.establish(lp);
        ++out.rerouted;
        if (first_hit) ++metrics_.reconfig_success;
      } else {
        ++out.dropped;
        if (first_hit) ++metrics_.reconfig_dropped;
      }
    }
    state_.set_failed(e, false);
    return out;
  }

  /// Appends current occupancy of every scanned resource to its window,
  /// `times` times over.
  void scan_occupancy(std::uint64_t times = 1) {
    const auto pushes = std::min<std::uint64_t>(times, cfg_.scan_window);
    for (std::uint64_t i = 0; i < pushes; ++i) {
      for (const auto& l : topo_.links())
        if (auto& w = stats_.link_occupancy[l.id.index()]) w->push(state_.occupied_channels(l.id));
      for (const auto& r : topo_.routers())
        if (auto& w = stats_.router_occupancy[r.id.index()]) w->push(state_.converters_in_use(r.id));
    }
    trace_line(times == 1 ? std::string("scan") : "scan x" + std::to_string(times));
  }

  /// Ends an active lightpath now; returns false if it is no longer active.
  bool depart(std::uint64_t id) {
    if (!state_.is_active(id)) return false;
    Lightpath lp = state_.release(id);
    stats_.holding({lp.source.value, lp.destination.value}).add(now_ - lp.arrival_time);
    return true;
  }

  void advance_to(double t) {
    if (t < now_) throw std::invalid_argument("Simulator::advance_to: time runs backwards");
    now_ = t;
  }

  [[nodiscard]] double now() const { return now_; }
  [[nodiscard]] const NetworkState& state() const { return state_; }
  [[nodiscard]] NetworkState& mutable_state() { return state_; }
  [[nodiscard]] const ElementStats& stats() const { return stats_; }
  [[nodiscard]] const Metrics& metrics() const { return metrics_; }
  [[nodiscard]] const SimulationConfig& config() const { return cfg_; }
  [[nodiscard]] Algorithm algorithm() const { return algorithm_; }

  [[nodiscard]] CostContext context() const { return CostContext{topo_, state_, stats_, cfg_.cost}; }

 private:
  void init_stats() {
    const double h = cfg_.mean_holding;
    stats_.prior_holding_mean = h;
    stats_.prior_holding_variance = h * h;
    const double pairs = static_cast<double>(topo_.router_count() * (topo_.router_count() - 1));
    stats_.prior_arrival_mean = pairs / cfg_.arrival_rate;
    stats_.prior_arrival_variance = stats_.prior_arrival_mean * stats_.prior_arrival_mean;
    stats_.estimator = cfg_.estimator;

    auto failure_prior = [&](ReliabilityClass c) {
      const double rate = cfg_.failures.rate(c);
      const double mean = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
      return DurationEstimator(mean, mean * mean, cfg_.estimator);
    };
    const double delta = cfg_.effective_scan_interval();
    for (const auto& l : topo_.links()) {
      stats_.link_failure_interarrival.push_back(failure_prior(l.reliability));
      stats_.link_occupancy.emplace_back(OccupancyScanWindow(l.capacity(), cfg_.scan_window, delta));
    }
    const bool spn = topo_.mode() == ConversionMode::share_per_node;
    for (const auto& r : topo_.routers()) {
      stats_.router_failure_interarrival.push_back(failure_prior(r.reliability));
      if (spn && r.converter_count > 0)
        stats_.router_occupancy.emplace_back(OccupancyScanWindow(r.converter_count, cfg_.scan_window, delta));
      else
        stats_.router_occupancy.emplace_back(std::nullopt);
    }
    last_link_failure_.assign(topo_.link_count(), 0.0);
    last_router_failure_.assign(topo_.router_count(), 0.0);
    warmup_requests_ =
        static_cast<std::uint64_t>(std::floor(cfg_.warmup_fraction * static_cast<double>(cfg_.requests)));
  }

  static std::uint64_t encode(ElementRef e) {
    return (static_cast<std::uint64_t>(e.kind) << 32) | e.index;
  }
  static ElementRef decode(std::uint64_t code) {
    return ElementRef{static_cast<ElementRef::Kind>(code >> 32), static_cast<std::uint32_t>(code & 0xffffffffu)};
  }

  void push(double t, EventKind kind, std::uint64_t payload) { queue_.push(Event{t, kind, seq_++, payload}); }

  void schedule_arrival() { push(now_ + sample_exponential(arrival_rng_, 1.0 / cfg_.arrival_rate), EventKind::arrival, 0); }

  void schedule_failure(ElementRef e) {
    const auto cls = e.kind == ElementRef::Kind::link ? topo_.link(LinkId{e.index}).reliability
                                                       : topo_.router(RouterId{e.index}).reliability;
    const double rate = cfg_.failures.rate(cls);
    if (rate > 0.0) push(now_ + sample_exponential(failure_rng_, 1.0 / rate), EventKind::failure, encode(e));
  }

  void on_arrival() {
    const auto n = topo_.router_count();
    const std::size_t pick = arrival_rng_.index(n * (n - 1));
    const RouterId s{pick / (n - 1)};
    std::size_t di = pick % (n - 1);
    if (di >= s.index()) ++di;
    const RouterId d{di};
    const bool counted = requests_seen_ >= warmup_requests_;
    ++requests_seen_;

    const RouterPair pair{s.value, d.value};
    if (auto it = last_pair_arrival_.find(pair); it != last_pair_arrival_.end())
      stats_.arrival(pair).add(now_ - it->second);
    last_pair_arrival_[pair] = now_;

    auto decision = handle_arrival(s, d, counted);
    if (trace_) {
      std::string line = "arrival " + topo_.label(s) + ' ' + topo_.label(d) + (decision.accepted ? " accepted" : " blocked");
      for (const auto& h : decision.hops) line += ' ' + std::to_string(h.link.value) + ':' + std::to_string(h.wavelength);
      trace_line(line);
    }
    if (requests_seen_ < cfg_.requests) schedule_arrival();
  }

  RouteDecision admit(RouterId s, RouterId d, double holding, bool counted) {
    if (counted) ++metrics_.offered;
    auto decision = route(algorithm_, context(), s, d, cfg_.routing, routing_rng_);
    if (!decision.accepted) {
      if (counted) ++metrics_.blocked;
      return decision;
    }
    Lightpath lp;
    lp.id = next_lightpath_id_++;
    lp.source = s;
    lp.destination = d;
    lp.hops = decision.hops;
    lp.conversions = decision.conversions;
    lp.arrival_time = now_;
    lp.departure_time = now_ + holding;
    lp.counted = counted;
    state_.establish(lp);
    if (counted) {
      ++metrics_.accepted;
      metrics_.total_hops += lp.hops.size();
    }
    push(lp.departure_time, EventKind::departure, lp.id);
    return decision;
  }

  void on_departure(std::uint64_t id) {
    const bool was_active = depart(id);
    if (trace_) trace_line("departure " + std::to_string(id) + (was_active ? "" : " inactive"));
  }

  void on_failure(ElementRef e) {
    auto out = inject_failure(e);
    if (trace_) {
      const std::string what = e.kind == ElementRef::Kind::link ? "link " + std::to_string(e.index)
                                                                 : "router " + topo_.label(RouterId{e.index});
      trace_line("failure " + what + " hit=" + std::to_string(out.hit) + " rerouted=" + std::to_string(out.rerouted) +
                 " dropped=" + std::to_string(out.dropped));
    }
    schedule_failure(e);
  }

  /// Runs every scan due strictly before `t`; the trace time is the last one.
  void scans_before(double t) {
    const double delta = cfg_.effective_scan_interval();
    auto at = [&](std::uint64_t k) { return static_cast<double>(k) * delta; };
    if (!(at(next_scan_) < t)) return;
    auto last = std::max(next_scan_, static_cast<std::uint64_t>(std::ceil(t / delta)));
    while (last > next_scan_ && !(at(last) < t)) --last;
    while (at(last + 1) < t) ++last;
    now_ = at(last);
    scan_occupancy(last - next_scan_ + 1);
    next_scan_ = last + 1;
  }

  void trace_line(const std::string& text) {
    if (!trace_) return;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g ", now_);
    *trace_ << buf << text << '\n';
  }

  const Topology& topo_;
  SimulationConfig cfg_;
  Algorithm algorithm_;
  NetworkState state_;
  ElementStats stats_;
  Metrics metrics_;
  Rng arrival_rng_;
  Rng holding_rng_;
  Rng failure_rng_;
  Rng routing_rng_;
  std::ostream* trace_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::uint64_t next_scan_ = 1;
  std::uint64_t requests_seen_ = 0;
  std::uint64_t warmup_requests_ = 0;
  std::uint64_t next_lightpath_id_ = 0;
  std::vector<double> last_link_failure_;
  std::vector<double> last_router_failure_;
  std::map<RouterPair, double> last_pair_arrival_;
};

/// One replication.
inline Metrics run(const SimulationConfig& config, const Topology& topology, Algorithm algorithm, std::uint64_t seed,
                   std::ostream* trace = nullptr) {
  Simulator sim(topology, config, algorithm, seed, trace);
  return sim.run();
}

}  // namespace lightroute
