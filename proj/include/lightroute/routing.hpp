#pragma once

// Route selection: MRPR (minimum reconfiguration probability), AUR
// (adaptive shortest-hop over the feasible subgraph) and LLR (least loaded,
// maximum bottleneck residual capacity), plus wavelength assignment.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lightroute/auxgraph.hpp"
#include "lightroute/graph.hpp"
#include "lightroute/network_state.hpp"
#include "lightroute/rng.hpp"
#include "lightroute/topology.hpp"

namespace lightroute {

enum class Algorithm { mrpr, aur, llr };
enum class WavelengthPolicy { first_fit, random };
enum class TieBreak { lexicographic, random };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::mrpr: return "mrpr";
    case Algorithm::aur: return "aur";
    case Algorithm::llr: return "llr";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "mrpr") return Algorithm::mrpr;
  if (s == "aur") return Algorithm::aur;
  if (s == "llr") return Algorithm::llr;
  return std::nullopt;
}

struct RoutingOptions {
  WavelengthPolicy wavelength_policy = WavelengthPolicy::first_fit;
  TieBreak tie_break = TieBreak::lexicographic;
  std::size_t llr_exhaustive_limit = 8;  // enumerate all simple paths up to this many routers
  std::size_t llr_candidates = 5;        // K shortest-hop candidates above the limit
};

struct RouteDecision {
  bool accepted = false;
  std::vector<Hop> hops;
  std::vector<Conversion> conversions;
  double total_cost = kInfiniteCost;
  Algorithm algorithm = Algorithm::mrpr;

  static RouteDecision blocked(Algorithm a) { return RouteDecision{false, {}, {}, kInfiniteCost, a}; }

  /// Routers visited in order, source first.
  [[nodiscard]] std::vector<RouterId> routers(const Topology& topo) const {
    std::vector<RouterId> out;
    if (hops.empty()) return out;
    out.push_back(topo.link(hops.front().link).from);
    for (const auto& h : hops) out.push_back(topo.link(h.link).to);
    return out;
  }
};

/// Smallest (first fit) or a uniformly drawn (random) wavelength free on
/// every listed link; empty when none is.
inline std::optional<Wavelength> assign_wavelength(std::span<const LinkId> links, const NetworkState& state,
                                                   WavelengthPolicy policy, Rng& rng) {
  if (links.empty()) return std::nullopt;
  std::vector<Wavelength> common = state.free_wavelengths(links.front());
  for (std::size_t i = 1; i < links.size() && !common.empty(); ++i) {
    std::vector<Wavelength> next;
    for (Wavelength w : common)
      if (state.channel_free(links[i], w)) next.push_back(w);
    common = std::move(next);
  }
  if (common.empty()) return std::nullopt;
  if (policy == WavelengthPolicy::first_fit) return common.front();
  return common[rng.index(common.size())];
}

/// Per-hop wavelengths for a fixed route. With full conversion each hop is
/// assigned independently. With share-per-node converters the assignment
/// minimises the number of conversions, converting only at routers with a
/// free converter.
inline std::optional<ExtractedPath> assign_along_path(std::span<const LinkId> links, const NetworkState& state,
                                                      WavelengthPolicy policy, Rng& rng) {
  const auto& topo = state.topology();
  ExtractedPath out;
  if (links.empty()) return std::nullopt;

  if (state.full_conversion()) {
    for (LinkId l : links) {
      auto w = assign_wavelength(std::span<const LinkId>(&l, 1), state, policy, rng);
      if (!w) return std::nullopt;
      if (!out.hops.empty() && out.hops.back().wavelength != *w)
        out.conversions.push_back({topo.link(l).from, out.hops.back().wavelength, *w});
      out.hops.push_back({l, *w});
    }
    return out;
  }

  const std::uint32_t W = topo.max_wavelengths();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = links.size();
  // best[i][w]: fewest conversions for hops i..n-1 when hop i uses w.
  std::vector<std::vector<std::uint32_t>> best(n, std::vector<std::uint32_t>(W + 1, kNone));
  for (std::size_t ii = n; ii-- > 0;) {
    for (Wavelength w = 1; w <= W; ++w) {
      if (!state.channel_free(links[ii], w)) continue;
      if (ii + 1 == n) {
        best[ii][w] = 0;
        continue;
      }
      const RouterId via = topo.link(links[ii + 1]).from;
      std::uint32_t b = best[ii + 1][w];
      if (state.converter_available(via))
        for (Wavelength x = 1; x <= W; ++x)
          if (x != w && best[ii + 1][x] != kNone) b = std::min(b, best[ii + 1][x] + 1);
      best[ii][w] = b;
    }
  }

  auto pick = [&](const std::vector<Wavelength>& tied) {
    return policy == WavelengthPolicy::first_fit ? tied.front() : tied[rng.index(tied.size())];
  };

  std::uint32_t target = kNone;
  for (Wavelength w = 1; w <= W; ++w) target = std::min(target, best[0][w]);
  if (target == kNone) return std::nullopt;
  std::vector<Wavelength> tied;
  for (Wavelength w = 1; w <= W; ++w)
    if (best[0][w] == target) tied.push_back(w);
  Wavelength cur = pick(tied);
  out.hops.push_back({links[0], cur});
  for (std::size_t i = 1; i < n; ++i) {
    const std::uint32_t remaining = best[i - 1][cur];
    if (best[i][cur] == remaining) {
      out.hops.push_back({links[i], cur});
      continue;
    }
    tied.clear();
    for (Wavelength x = 1; x <= W; ++x)
      if (x != cur && best[i][x] != kNone && best[i][x] + 1 == remaining) tied.push_back(x);
    if (tied.empty()) throw InvariantViolation("assign_along_path: inconsistent table");
    const Wavelength next = pick(tied);
    out.conversions.push_back({topo.link(links[i]).from, cur, next});
    cur = next;
    out.hops.push_back({links[i], cur});
  }
  return out;
}

namespace detail {

inline bool has_repeated_router(const Topology& topo, const std::vector<Hop>& hops) {
  std::set<std::uint32_t> seen;
  if (hops.empty()) return false;
  seen.insert(topo.link(hops.front().link).from.value);
  for (const auto& h : hops)
    if (!seen.insert(topo.link(h.link).to.value).second) return true;
  return false;
}

inline RouteDecision accept(Algorithm a, ExtractedPath p, double cost) {
  return RouteDecision{true, std::move(p.hops), std::move(p.conversions), cost, a};
}

/// Hop distances to `d` over links passing `usable`.
inline std::vector<std::uint32_t> hops_to(const Topology& topo, RouterId d,
                                          const std::function<bool(LinkId)>& usable) {
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::vector<LinkId>> in_links(topo.router_count());
  for (const auto& l : topo.links())
    if (usable(l.id)) in_links[l.to.index()].push_back(l.id);
  std::vector<std::uint32_t> dist(topo.router_count(), kInf);
  std::deque<RouterId> queue{d};
  dist[d.index()] = 0;
  while (!queue.empty()) {
    RouterId v = queue.front();
    queue.pop_front();
    for (LinkId l : in_links[v.index()]) {
      RouterId u = topo.link(l).from;
      if (dist[u.index()] == kInf) {
        dist[u.index()] = dist[v.index()] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

/// Minimum-hop route s -> d over usable links; lexicographically smallest
/// router sequence, or a uniformly random shortest route with TieBreak::random.
inline std::optional<std::vector<LinkId>> shortest_hop_route(const Topology& topo, RouterId s, RouterId d,
                                                             const std::function<bool(LinkId)>& usable,
                                                             TieBreak tie, Rng& rng) {
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  auto dist = hops_to(topo, d, usable);
  if (dist[s.index()] == kInf || s == d) return std::nullopt;
  std::vector<LinkId> route;
  RouterId cur = s;
  while (cur != d) {
    std::vector<LinkId> next;
    for (LinkId l : topo.out_links(cur))
      if (usable(l) && dist[topo.link(l).to.index()] + 1 == dist[cur.index()]) next.push_back(l);
    std::ranges::sort(next, [&](LinkId a, LinkId b) {
      return std::pair(topo.link(a).to, a) < std::pair(topo.link(b).to, b);
    });
    LinkId chosen = tie == TieBreak::random ? next[rng.index(next.size())] : next.front();
    route.push_back(chosen);
    cur = topo.link(chosen).to;
  }
  return route;
}

inline std::vector<RouterId> route_routers(const Topology& topo, const std::vector<LinkId>& route) {
  std::vector<RouterId> out;
  if (route.empty()) return out;
  out.push_back(topo.link(route.front()).from);
  for (LinkId l : route) out.push_back(topo.link(l).to);
  return out;
}

/// All simple s -> d routes over usable links, DFS in link-id order.
inline std::vector<std::vector<LinkId>> all_simple_routes(const Topology& topo, RouterId s, RouterId d,
                                                          const std::function<bool(LinkId)>& usable) {
  std::vector<std::vector<LinkId>> out;
  std::vector<bool> on_path(topo.router_count(), false);
  std::vector<LinkId> stack;
  std::function<void(RouterId)> dfs = [&](RouterId u) {
    if (u == d) {
      out.push_back(stack);
      return;
    }
    on_path[u.index()] = true;
    for (LinkId l : topo.out_links(u)) {
      RouterId v = topo.link(l).to;
      if (!usable(l) || on_path[v.index()]) continue;
      stack.push_back(l);
      dfs(v);
      stack.pop_back();
    }
    on_path[u.index()] = false;
  };
  if (s != d) dfs(s);
  return out;
}

/// Up to k loopless minimum-hop routes (Yen), ordered by hop count then
/// router sequence.
inline std::vector<std::vector<LinkId>> k_shortest_hop_routes(const Topology& topo, RouterId s, RouterId d,
                                                              const std::function<bool(LinkId)>& usable,
                                                              std::size_t k) {
  std::vector<std::vector<LinkId>> accepted;
  Rng unused(0);
  auto first = shortest_hop_route(topo, s, d, usable, TieBreak::lexicographic, unused);
  if (!first || k == 0) return accepted;
  accepted.push_back(*first);

  auto key = [&](const std::vector<LinkId>& r) { return std::pair(r.size(), route_routers(topo, r)); };
  std::vector<std::vector<LinkId>> pool;

  while (accepted.size() < k) {
    const auto& prev = accepted.back();
    const auto prev_routers = route_routers(topo, prev);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const RouterId spur = prev_routers[i];
      const std::vector<LinkId> root(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(i));
      std::set<std::uint32_t> banned_links;
      for (const auto& r : accepted)
        if (r.size() > i && std::equal(root.begin(), root.end(), r.begin())) banned_links.insert(r[i].value);
      std::set<std::uint32_t> banned_routers;
      for (std::size_t j = 0; j < i; ++j) banned_routers.insert(prev_routers[j].value);
      auto spur_usable = [&](LinkId l) {
        const auto& link = topo.link(l);
        return usable(l) && !banned_links.contains(l.value) && !banned_routers.contains(link.from.value) &&
               !banned_routers.contains(link.to.value);
      };
      auto tail = shortest_hop_route(topo, spur, d, spur_usable, TieBreak::lexicographic, unused);
      if (!tail) continue;
      std::vector<LinkId> candidate = root;
      candidate.insert(candidate.end(), tail->begin(), tail->end());
      if (std::ranges::find(pool, candidate) == pool.end() && std::ranges::find(accepted, candidate) == accepted.end())
        pool.push_back(std::move(candidate));
    }
    if (pool.empty()) break;
    auto best = std::ranges::min_element(pool, [&](const auto& a, const auto& b) { return key(a) < key(b); });
    accepted.push_back(*best);
    pool.erase(best);
  }
  return accepted;
}

}  // namespace detail

/// Minimum reconfiguration probability route.
inline RouteDecision route_mrpr(const CostContext& ctx, RouterId s, RouterId d, const RoutingOptions& opts, Rng& rng) {
  check_request(ctx.topology, s, d);
  if (s == d) throw std::invalid_argument("route_mrpr: source equals destination");

  if (ctx.state.full_conversion()) {
    Digraph g = build_wi_graph(ctx, s, d);
    double cost = kInfiniteCost;
    const auto edges = lexicographic_shortest_path(g, s.value, d.value, &cost);
    if (edges.empty()) return RouteDecision::blocked(Algorithm::mrpr);
    std::vector<LinkId> route;
    for (std::size_t e : edges) route.push_back(LinkId{g.edge(e).tag});
    auto assigned = assign_along_path(route, ctx.state, opts.wavelength_policy, rng);
    if (!assigned) return RouteDecision::blocked(Algorithm::mrpr);
    return detail::accept(Algorithm::mrpr, std::move(*assigned), cost);
  }

  AuxGraph aux = build_spn_graph(ctx, s, d);
  auto sp = bellman_ford(aux.graph, aux.source_terminal());
  if (!sp.reachable(aux.dest_terminal())) return RouteDecision::blocked(Algorithm::mrpr);
  ExtractedPath path = extract_lightpath(aux, sp);
  // A route that re-enters a router is not a valid lightpath here.
  if (detail::has_repeated_router(ctx.topology, path.hops)) return RouteDecision::blocked(Algorithm::mrpr);
  return detail::accept(Algorithm::mrpr, std::move(path), sp.distance[aux.dest_terminal()]);
}

/// Adaptive unconstrained routing: minimum hops over links that currently
/// have a free channel and unfailed endpoints.
inline RouteDecision route_aur(const Topology& topo, const NetworkState& state, RouterId s, RouterId d,
                               const RoutingOptions& opts, Rng& rng) {
  check_request(topo, s, d);
  if (s == d) throw std::invalid_argument("route_aur: source equals destination");
  auto usable = [&](LinkId l) { return state.link_usable(l); };
  auto route = detail::shortest_hop_route(topo, s, d, usable, opts.tie_break, rng);
  if (!route) return RouteDecision::blocked(Algorithm::aur);
  auto assigned = assign_along_path(*route, state, opts.wavelength_policy, rng);
  if (!assigned) return RouteDecision::blocked(Algorithm::aur);
  const double cost = static_cast<double>(route->size());
  return detail::accept(Algorithm::aur, std::move(*assigned), cost);
}

/// Least loaded routing: the candidate route with the largest bottleneck of
/// free channels; ties go to fewer hops, then router sequence (or a seeded
/// draw with TieBreak::random).
inline RouteDecision route_llr(const Topology& topo, const NetworkState& state, RouterId s, RouterId d,
                               const RoutingOptions& opts, Rng& rng) {
  check_request(topo, s, d);
  if (s == d) throw std::invalid_argument("route_llr: source equals destination");
  auto usable = [&](LinkId l) { return state.link_usable(l); };
  auto candidates = topo.router_count() <= opts.llr_exhaustive_limit
                        ? detail::all_simple_routes(topo, s, d, usable)
                        : detail::k_shortest_hop_routes(topo, s, d, usable, opts.llr_candidates);
  if (candidates.empty()) return RouteDecision::blocked(Algorithm::llr);

  struct Scored {
    std::uint32_t bottleneck;
    std::size_t hops;
    std::vector<RouterId> routers;
    std::size_t index;
  };
  std::vector<Scored> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::uint32_t b = std::numeric_limits<std::uint32_t>::max();
    for (LinkId l : candidates[i]) b = std::min(b, state.free_channels(l));
    if (b == 0) continue;
    scored.push_back({b, candidates[i].size(), detail::route_routers(topo, candidates[i]), i});
  }
  std::ranges::sort(scored, [](const Scored& a, const Scored& b) {
    if (a.bottleneck != b.bottleneck) return a.bottleneck > b.bottleneck;
    if (a.hops != b.hops) return a.hops < b.hops;
    return a.routers < b.routers;
  });
  if (opts.tie_break == TieBreak::random && !scored.empty()) {
    std::size_t ties = 1;
    while (ties < scored.size() && scored[ties].bottleneck == scored[0].bottleneck && scored[ties].hops == scored[0].hops)
      ++ties;
    std::swap(scored[0], scored[rng.index(ties)]);
  }
  for (const auto& c : scored) {
    auto assigned = assign_along_path(candidates[c.index], state, opts.wavelength_policy, rng);
    if (assigned) return detail::accept(Algorithm::llr, std::move(*assigned), static_cast<double>(c.hops));
  }
  return RouteDecision::blocked(Algorithm::llr);
}

inline RouteDecision route(Algorithm a, const CostContext& ctx, RouterId s, RouterId d, const RoutingOptions& opts,
                           Rng& rng) {
  switch (a) {
    case Algorithm::mrpr: return route_mrpr(ctx, s, d, opts, rng);
    case Algorithm::aur: return route_aur(ctx.topology, ctx.state, s, d, opts, rng);
    case Algorithm::llr: return route_llr(ctx.topology, ctx.state, s, d, opts, rng);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace lightroute
