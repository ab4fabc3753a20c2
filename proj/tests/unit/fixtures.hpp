#pragma once

#include <string>

#include "lightroute/lightroute.hpp"

namespace fixtures {

using namespace lightroute;

inline Topology example6() { return parse_topology(read_file(LIGHTROUTE_DATA_DIR "/example6.topo")); }

/// Estimators reporting the same (mean, variance) for every element.
inline ElementStats uniform_stats(const Topology& t, double mean, double variance) {
  ElementStats s;
  for (std::size_t i = 0; i < t.link_count(); ++i) s.link_failure_interarrival.emplace_back(mean, variance);
  for (std::size_t i = 0; i < t.router_count(); ++i) s.router_failure_interarrival.emplace_back(mean, variance);
  return s;
}

/// Occupies one fiber of wavelength w on a link with a one-hop lightpath.
inline void occupy(NetworkState& st, LinkId l, Wavelength w, std::uint64_t id) {
  Lightpath lp;
  lp.id = id;
  lp.source = st.topology().link(l).from;
  lp.destination = st.topology().link(l).to;
  lp.hops = {{l, w}};
  st.establish(lp);
}

inline LinkId link_between(const Topology& t, const std::string& a, const std::string& b) {
  for (const auto& n : neighbors(t, t.router_id(a)))
    if (t.label(n.head) == b) return n.link;
  throw std::invalid_argument("no link " + a + "->" + b);
}

/// Routers of a decision as a label string, e.g. "ABC".
inline std::string labels(const Topology& t, const RouteDecision& d) {
  std::string s;
  for (auto r : d.routers(t)) s += t.label(r);
  return s;
}

/// Every hop free and every conversion backed by a converter in `before`;
/// the hops form a simple s -> d walk.
inline ::testing::AssertionResult physically_valid(const NetworkState& before, const RouteDecision& d, RouterId s,
                                                   RouterId dst) {
  const auto& t = before.topology();
  if (!d.accepted) return ::testing::AssertionSuccess();
  if (d.hops.empty()) return ::testing::AssertionFailure() << "accepted with no hops";
  if (!std::isfinite(d.total_cost)) return ::testing::AssertionFailure() << "accepted with infinite cost";
  for (const auto& h : d.hops)
    if (!before.channel_free(h.link, h.wavelength))
      return ::testing::AssertionFailure() << "channel " << h.link.value << "/" << h.wavelength << " busy";
  auto rs = d.routers(t);
  if (rs.front() != s || rs.back() != dst) return ::testing::AssertionFailure() << "wrong endpoints";
  for (std::size_t i = 0; i + 1 < d.hops.size(); ++i)
    if (t.link(d.hops[i].link).to != t.link(d.hops[i + 1].link).from)
      return ::testing::AssertionFailure() << "disconnected hops";
  std::set<std::uint32_t> seen;
  for (auto r : rs)
    if (!seen.insert(r.value).second) return ::testing::AssertionFailure() << "repeated router";
  for (const auto& c : d.conversions)
    if (!before.converter_available(c.router))
      return ::testing::AssertionFailure() << "conversion without a free converter at " << c.router.value;
  return ::testing::AssertionSuccess();
}

}  // namespace fixtures
