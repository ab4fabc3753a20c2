#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "fixtures.hpp"

using namespace lightroute;
using namespace fixtures;

namespace {

SimulationConfig quiet_config() {
  SimulationConfig c;
  c.failures.reliable = 0.0;
  c.failures.unreliable = 0.0;
  return c;
}

// A -> B -> D, A -> C -> D, W = 2.
Topology square() {
  return parse_topology(
      "router A\nrouter B\nrouter C\nrouter D\n"
      "link A B wavelengths=2\nlink B D wavelengths=2\nlink A C wavelengths=2\nlink C D wavelengths=2\n");
}

}  // namespace

TEST(LoadPerWavelength, Examples) {
  EXPECT_DOUBLE_EQ(load_per_wavelength(0.0, 2.0, 3, 8), 0.0);
  EXPECT_DOUBLE_EQ(load_per_wavelength(12.0, 2.0, 3, 8), 1.0);
  EXPECT_DOUBLE_EQ(load_per_wavelength(12.0, 2.0, 6, 8), 0.5);
  EXPECT_THROW(load_per_wavelength(1.0, 1.0, 0, 8), std::invalid_argument);
}

TEST(EventOrder, TimeThenKindThenSequence) {
  Event fail{1.0, EventKind::failure, 9, 0}, dep{1.0, EventKind::departure, 1, 0}, arr{1.0, EventKind::arrival, 0, 0};
  Event early{0.5, EventKind::scan, 10, 0};
  EXPECT_TRUE(dep > fail);
  EXPECT_TRUE(arr > dep);
  EXPECT_TRUE(fail > early);
  Event arr2{1.0, EventKind::arrival, 3, 0};
  EXPECT_TRUE(arr2 > arr);
}

TEST(HandleArrival, AcceptOnEmptyNetworkAndConserve) {
  auto t = parse_topology(
      "router A\nrouter B\nrouter C\nrouter D\n"
      "link A B wavelengths=2\nlink B C wavelengths=2\nlink C D wavelengths=2\n");
  Simulator sim(t, quiet_config(), Algorithm::aur, 1);
  auto d = sim.handle_arrival(RouterId{0}, RouterId{3});
  ASSERT_TRUE(d.accepted);
  EXPECT_EQ(d.hops.size(), 3u);
  std::uint32_t busy = 0;
  for (const auto& l : t.links()) busy += sim.state().occupied_channels(l.id);
  EXPECT_EQ(busy, 3u);
  sim.state().check_conservation();
  EXPECT_EQ(sim.metrics().offered, 1u);
  EXPECT_EQ(sim.metrics().accepted, 1u);
}

TEST(HandleArrival, SaturatedNetworkBlocks) {
  auto t = parse_topology("router A\nrouter B\nlink A B wavelengths=1\n");
  for (Algorithm alg : {Algorithm::mrpr, Algorithm::aur, Algorithm::llr}) {
    Simulator sim(t, quiet_config(), alg, 1);
    EXPECT_TRUE(sim.handle_arrival(RouterId{0}, RouterId{1}).accepted);
    EXPECT_FALSE(sim.handle_arrival(RouterId{0}, RouterId{1}).accepted);
    EXPECT_EQ(sim.metrics().blocked, 1u);
  }
}

TEST(InjectFailure, IdleElementHasNoEffect) {
  auto t = square();
  Simulator sim(t, quiet_config(), Algorithm::aur, 1);
  auto out = sim.inject_failure(ElementRef::of(LinkId{0}));
  EXPECT_EQ(out.hit, 0u);
  EXPECT_EQ(sim.metrics().reconfig_events, 0u);
}

TEST(InjectFailure, ReroutesOverSpareCapacity) {
  auto t = square();
  Simulator sim(t, quiet_config(), Algorithm::aur, 1);
  for (int i = 0; i < 2; ++i) ASSERT_EQ(labels(t, sim.handle_arrival(RouterId{0}, RouterId{3})), "ABD");
  auto out = sim.inject_failure(ElementRef::of(LinkId{0}));
  EXPECT_EQ(out.hit, 2u);
  EXPECT_EQ(out.rerouted, 2u);
  EXPECT_EQ(sim.metrics().reconfig_events, 2u);
  EXPECT_EQ(sim.metrics().reconfig_success, 2u);
  EXPECT_EQ(sim.metrics().reconfig_dropped, 0u);
  EXPECT_EQ(sim.state().occupied_channels(LinkId{0}), 0u);
  EXPECT_EQ(sim.state().occupied_channels(LinkId{2}), 2u);
  EXPECT_FALSE(sim.state().link_failed(LinkId{0}));  // instantaneous hit
  sim.state().check_conservation();
}

TEST(InjectFailure, DropsWhenNoAlternative) {
  auto t = parse_topology("router A\nrouter B\nlink A B wavelengths=2\n");
  Simulator sim(t, quiet_config(), Algorithm::mrpr, 1);
  ASSERT_TRUE(sim.handle_arrival(RouterId{0}, RouterId{1}).accepted);
  auto out = sim.inject_failure(ElementRef::of(LinkId{0}));
  EXPECT_EQ(out.dropped, 1u);
  EXPECT_EQ(sim.metrics().reconfig_dropped, 1u);
  EXPECT_EQ(sim.metrics().reconfig_events, 1u);
  EXPECT_TRUE(sim.state().active().empty());
}

TEST(InjectFailure, RouterFailureDisplacesTransitLightpaths) {
  auto t = square();
  Simulator sim(t, quiet_config(), Algorithm::llr, 1);
  auto d = sim.handle_arrival(RouterId{0}, RouterId{3});
  ASSERT_TRUE(d.accepted);
  const RouterId via = d.routers(t)[1];
  auto out = sim.inject_failure(ElementRef::of(via));
  EXPECT_EQ(out.hit, 1u);
  EXPECT_EQ(out.rerouted, 1u);
  const auto& lp = sim.state().active().begin()->second;
  EXPECT_NE(t.link(lp.hops[0].link).to, via);
}

TEST(InjectFailure, CountsEachLightpathOnce) {
  auto t = square();
  Simulator sim(t, quiet_config(), Algorithm::aur, 1);
  ASSERT_TRUE(sim.handle_arrival(RouterId{0}, RouterId{3}).accepted);
  sim.inject_failure(ElementRef::of(LinkId{0}));  // moves to A-C-D
  sim.inject_failure(ElementRef::of(LinkId{2}));  // moves back to A-B-D
  EXPECT_EQ(sim.metrics().reconfig_events, 1u);
  EXPECT_LE(sim.metrics().reconfiguration_probability(), 1.0);
}

TEST(Scan, IdleAndBusySamples) {
  auto t = parse_topology(
      "router A\nrouter B\nrouter C\nlink A B wavelengths=3\nlink B C wavelengths=3\nlink C A wavelengths=3\n");
  auto cfg = quiet_config();
  cfg.scan_window = 4;
  Simulator sim(t, cfg, Algorithm::aur, 1);
  sim.scan_occupancy();
  for (const auto& w : sim.stats().link_occupancy) EXPECT_EQ(w->samples(), (std::vector<std::uint32_t>{0}));
  ASSERT_TRUE(sim.handle_arrival(RouterId{0}, RouterId{2}).accepted);
  for (int i = 0; i < 4; ++i) sim.scan_occupancy();
  EXPECT_GE(sim.stats().link_occupancy[0]->samples().back(), 1u);
  EXPECT_GE(sim.stats().link_occupancy[1]->samples().back(), 1u);
  EXPECT_EQ(sim.stats().link_occupancy[2]->samples().back(), 0u);
  EXPECT_EQ(sim.stats().link_occupancy[0]->samples(), (std::vector<std::uint32_t>{1, 1, 1, 1}));
}

TEST(Scan, RouterWindowsOnlyForSharePerNodeConverters) {
  auto t = parse_topology("mode spn\nrouter A converters=2\nrouter B\nlink A B wavelengths=2\n");
  Simulator sim(t, quiet_config(), Algorithm::mrpr, 1);
  EXPECT_TRUE(sim.stats().router_occupancy[0].has_value());
  EXPECT_FALSE(sim.stats().router_occupancy[1].has_value());
}

TEST(Depart, ReleasesAndLearnsHolding) {
  auto t = parse_topology("router A\nrouter B\nlink A B wavelengths=2\n");
  Simulator sim(t, quiet_config(), Algorithm::aur, 1);
  ASSERT_TRUE(sim.handle_arrival(RouterId{0}, RouterId{1}).accepted);
  const auto id = sim.state().active().begin()->first;
  sim.advance_to(2.5);
  EXPECT_TRUE(sim.depart(id));
  EXPECT_FALSE(sim.depart(id));
  EXPECT_EQ(sim.state().occupied_channels(LinkId{0}), 0u);
  EXPECT_EQ(sim.stats().holding_by_pair.at({0, 1}).moments().count(), 1u);
  EXPECT_THROW(sim.advance_to(1.0), std::invalid_argument);
}

TEST(Run, NoFailuresMeansNoReconfiguration) {
  auto t = example6();
  auto cfg = quiet_config();
  cfg.arrival_rate = 6.0;
  cfg.requests = 5000;
  cfg.check_invariants = true;
  for (Algorithm alg : {Algorithm::mrpr, Algorithm::aur, Algorithm::llr}) {
    auto m = run(cfg, t, alg, 3);
    EXPECT_EQ(m.reconfig_events, 0u);
    EXPECT_DOUBLE_EQ(m.reconfiguration_probability(), 0.0);
    EXPECT_EQ(m.offered, m.blocked + m.accepted);
    EXPECT_EQ(m.offered, 4500u);  // 10% warm-up
  }
}

TEST(Run, UncapacitatedNetworkAdmitsEverything) {
  auto t = parse_topology(
      "router A converters=64\nrouter B converters=64\nrouter C converters=64\n"
      "link A B wavelengths=64\nlink B A wavelengths=64\nlink B C wavelengths=64\n"
      "link C B wavelengths=64\nlink A C wavelengths=64\nlink C A wavelengths=64\n");
  auto cfg = quiet_config();
  cfg.arrival_rate = 3.0;
  cfg.requests = 10000;
  for (auto mode : {ConversionMode::full_conversion, ConversionMode::share_per_node}) {
    t.set_mode(mode);
    for (Algorithm alg : {Algorithm::mrpr, Algorithm::aur, Algorithm::llr})
      EXPECT_LE(run(cfg, t, alg, 9).blocking_probability(), 1e-3);
  }
}

TEST(Run, InvariantsHoldWithFailuresInBothModes) {
  auto t = example6();
  SimulationConfig cfg;
  cfg.arrival_rate = 8.0;
  cfg.requests = 4000;
  cfg.failures.reliable = 0.05;
  cfg.failures.unreliable = 0.2;
  cfg.check_invariants = true;
  t.set_router_class(RouterId{1}, ReliabilityClass::unreliable);
  for (auto mode : {ConversionMode::full_conversion, ConversionMode::share_per_node}) {
    t.set_mode(mode);
    for (Algorithm alg : {Algorithm::mrpr, Algorithm::aur, Algorithm::llr}) {
      Metrics m;
      ASSERT_NO_THROW(m = run(cfg, t, alg, 21)) << to_string(alg);
      EXPECT_EQ(m.offered, m.blocked + m.accepted);
      EXPECT_EQ(m.reconfig_events, m.reconfig_success + m.reconfig_dropped);
      EXPECT_GT(m.reconfig_events, 0u);
      EXPECT_GE(m.blocking_probability(), 0.0);
      EXPECT_LE(m.blocking_probability(), 1.0);
      EXPECT_LE(m.reconfiguration_probability(), 1.0);
    }
  }
}

TEST(Run, KalmanEstimatorRuns) {
  auto t = example6();
  SimulationConfig cfg;
  cfg.arrival_rate = 5.0;
  cfg.requests = 3000;
  cfg.failures.reliable = 0.02;
  cfg.estimator = EstimatorConfig{EstimatorKind::kalman, 0.01, 1.0};
  cfg.check_invariants = true;
  auto m = run(cfg, t, Algorithm::mrpr, 2);
  EXPECT_EQ(m.offered, m.blocked + m.accepted);
}

TEST(Run, TraceAndMetricsAreDeterministic) {
  auto t = example6();
  SimulationConfig cfg;
  cfg.arrival_rate = 7.0;
  cfg.requests = 2000;
  cfg.failures.reliable = 0.01;
  cfg.routing.tie_break = TieBreak::random;
  cfg.routing.wavelength_policy = WavelengthPolicy::random;
  for (Algorithm alg : {Algorithm::mrpr, Algorithm::aur, Algorithm::llr}) {
    std::ostringstream a, b;
    auto ma = run(cfg, t, alg, 1234, &a);
    auto mb = run(cfg, t, alg, 1234, &b);
    EXPECT_EQ(ma, mb);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_FALSE(a.str().empty());
    std::ostringstream c;
    run(cfg, t, alg, 1235, &c);
    EXPECT_NE(a.str(), c.str());
  }
}

TEST(Config, Validation) {
  SimulationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.arrival_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.warmup_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.scan_window = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.failures.reliable = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  auto one = parse_topology("router A\n");
  EXPECT_THROW(Simulator(one, SimulationConfig{}, Algorithm::aur, 0), ConfigError);
}

TEST(FailureRates, SwapFlag) {
  FailureRates r;
  EXPECT_DOUBLE_EQ(r.rate(ReliabilityClass::reliable), 1.0 / 1000.0);
  EXPECT_DOUBLE_EQ(r.rate(ReliabilityClass::unreliable), 1.0 / 1500.0);
  r.swap = true;
  EXPECT_DOUBLE_EQ(r.rate(ReliabilityClass::reliable), 1.0 / 1500.0);
  EXPECT_DOUBLE_EQ(r.rate(ReliabilityClass::unreliable), 1.0 / 1000.0);
}

TEST(Scan, BatchesCoverEveryScanTime) {
  auto t = parse_topology(read_file(LIGHTROUTE_DATA_DIR "/mmcc.topo"));
  auto cfg = quiet_config();
  cfg.arrival_rate = 0.05;  // long idle gaps between events
  cfg.mean_holding = 1.0;
  cfg.requests = 300;
  cfg.scan_window = 7;
  std::ostringstream trace;
  Simulator sim(t, cfg, Algorithm::aur, 5, &trace);
  sim.run();

  std::uint64_t scans = 0;
  bool batched = false;
  std::istringstream in(trace.str());
  std::string time, word;
  while (in >> time >> word) {
    if (word == "scan") {
      std::string rest;
      std::getline(in, rest);
      if (rest.rfind(" x", 0) == 0) {
        scans += std::stoull(rest.substr(2));
        batched = true;
      } else {
        ++scans;
      }
    } else {
      std::getline(in, word);
    }
  }
  const double delta = cfg.effective_scan_interval();
  const auto expected = static_cast<std::uint64_t>(std::ceil(sim.now() / delta)) - 1;
  EXPECT_TRUE(batched);
  EXPECT_NEAR(static_cast<double>(scans), static_cast<double>(expected), 1.0);
  for (const auto& w : sim.stats().link_occupancy) EXPECT_EQ(w->size(), 7u);
}
