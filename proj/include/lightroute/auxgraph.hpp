#pragma once

// Routing graphs. With full conversion the graph is the router graph with
// one edge per link. With share-per-node converters it is the layered
// auxiliary graph: an input and an output port per (router, wavelength),
// conversion and pass-through edges inside each router, channel edges per
// (link, wavelength), and zero-cost terminal edges.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightroute/cost.hpp"
#include "lightroute/graph.hpp"
#include "lightroute/network_state.hpp"
#include "lightroute/stats.hpp"
#include "lightroute/topology.hpp"

namespace lightroute {

enum class FailureModel { tchebycheff, exponential };
enum class LinkRepacking { none, erlang };

struct CostParams {
  FailureModel failure_model = FailureModel::tchebycheff;
  double repack_threshold = kDefaultRepackThreshold;
  LinkRepacking link_repacking = LinkRepacking::none;
  double mean_holding = 1.0;  // h for offered-load estimates
};

/// Read-only view of everything edge costs depend on.
struct CostContext {
  const Topology& topology;
  const NetworkState& state;
  const ElementStats& stats;
  CostParams params{};
};

/// Probability that `e` forces reconfiguration of an (s, d) lightpath by failing.
inline double element_failure_probability(const CostContext& ctx, ElementRef e, RouterId s, RouterId d) {
  const bool failed = ctx.state.failed(e);
  if (failed) return 1.0;
  const auto& est = e.kind == ElementRef::Kind::link ? ctx.stats.link_failure_interarrival
                                                      : ctx.stats.router_failure_interarrival;
  if (e.index >= est.size()) return 0.0;
  const auto [mu_h, var_h] = ctx.stats.holding_moments({s.value, d.value});
  const FailureStats fs{est[e.index].mean(), est[e.index].variance()};
  if (ctx.params.failure_model == FailureModel::exponential)
    return std::isinf(fs.mu_f) ? 0.0 : exact_failure_probability_exponential(fs.mu_f, mu_h);
  return tchebycheff_failure_probability(fs, HoldingStats{mu_h, var_h});
}

namespace detail {

// Offered load on a resource from its scan window; the capacity stands in
// until a usable estimate exists.
inline double offered_load_or_capacity(const std::optional<OccupancyScanWindow>& window, std::uint32_t capacity,
                                       double mean_holding) {
  if (window && !window->empty()) {
    auto est = estimate_offered_load(*window, mean_holding);
    if (est.arrival_rate && *est.arrival_rate > 0.0) return *est.arrival_rate * mean_holding;
  }
  return static_cast<double>(capacity);
}

}  // namespace detail

/// Repacking probability of a link; zero unless Erlang-based link repacking is enabled.
inline double link_repacking_probability(const CostContext& ctx, LinkId l) {
  if (ctx.params.link_repacking == LinkRepacking::none) return 0.0;
  const auto& link = ctx.topology.link(l);
  const std::optional<OccupancyScanWindow> none;
  const auto& window = l.index() < ctx.stats.link_occupancy.size() ? ctx.stats.link_occupancy[l.index()] : none;
  const double rho = detail::offered_load_or_capacity(window, link.capacity(), ctx.params.mean_holding);
  return repacking_probability(ctx.state.occupied_channels(l), link.capacity(), rho);
}

/// Repacking probability for a lightpath taking a converter at `r`.
inline double converter_repacking_probability(const CostContext& ctx, RouterId r) {
  const auto bank = ctx.topology.router(r).converter_count;
  if (bank == 0) return 1.0;
  const std::optional<OccupancyScanWindow> none;
  const auto& window = r.index() < ctx.stats.router_occupancy.size() ? ctx.stats.router_occupancy[r.index()] : none;
  const double rho = detail::offered_load_or_capacity(window, bank, ctx.params.mean_holding);
  return repacking_probability(ctx.state.converters_in_use(r), bank, rho);
}

inline void check_request(const Topology& topo, RouterId s, RouterId d) {
  if (s.index() >= topo.router_count() || d.index() >= topo.router_count())
    throw std::invalid_argument("unknown source or destination router");
}

/// Router graph: nodes are routers, one edge per link tagged with its LinkId,
/// secondary weight 1 (hop count).
inline Digraph build_wi_graph(const CostContext& ctx, RouterId s, RouterId d) {
  check_request(ctx.topology, s, d);
  Digraph g(ctx.topology.router_count());
  for (const auto& l : ctx.topology.links()) {
    double cost = kInfiniteCost;
    if (ctx.state.link_usable(l.id)) {
      const double f_link = element_failure_probability(ctx, ElementRef::of(l.id), s, d);
      const double f_head = element_failure_probability(ctx, ElementRef::of(l.to), s, d);
      const double r_link = apply_repack_threshold(link_repacking_probability(ctx, l.id), ctx.params.repack_threshold);
      cost = wi_edge_cost(f_link, f_head, r_link);
    }
    g.add_edge(l.from.value, l.to.value, cost, 1, l.id.value);
  }
  return g;
}

enum class AuxNodeKind : std::uint8_t { input_port, output_port, source_terminal, dest_terminal };
enum class AuxEdgeKind : std::uint8_t { channel, conversion, passthrough, source_attach, dest_attach };

struct AuxNode {
  AuxNodeKind kind = AuxNodeKind::input_port;
  RouterId router;
  Wavelength wavelength = 0;  // 0 for terminals
};

struct AuxGraph {
  // Channel edges outweigh any number of conversions in the tie-break.
  static constexpr std::uint64_t kHopWeight = 1ULL << 20;

  Digraph graph;
  std::vector<AuxNode> nodes;
  std::vector<AuxEdgeKind> edge_kinds;
  RouterId source;
  RouterId destination;
  std::uint32_t wavelengths = 0;

  [[nodiscard]] std::uint32_t input_port(RouterId n, Wavelength w) const {
    return 2 * (n.value * wavelengths + (w - 1));
  }
  [[nodiscard]] std::uint32_t output_port(RouterId n, Wavelength w) const { return input_port(n, w) + 1; }
  [[nodiscard]] std::uint32_t source_terminal() const { return static_cast<std::uint32_t>(nodes.size() - 2); }
  [[nodiscard]] std::uint32_t dest_terminal() const { return static_cast<std::uint32_t>(nodes.size() - 1); }

  [[nodiscard]] std::size_t count(AuxEdgeKind k) const {
    std::size_t n = 0;
    for (auto e : edge_kinds) n += e == k;
    return n;
  }
};

/// Layered share-per-node graph for request (s, d).
inline AuxGraph build_spn_graph(const CostContext& ctx, RouterId s, RouterId d) {
  check_request(ctx.topology, s, d);
  const auto& topo = ctx.topology;
  const std::uint32_t W = topo.max_wavelengths();
  const auto N = static_cast<std::uint32_t>(topo.router_count());

  AuxGraph aux{Digraph(2 * N * W + 2), {}, {}, s, d, W};
  aux.nodes.reserve(2 * N * W + 2);
  for (std::uint32_t n = 0; n < N; ++n)
    for (Wavelength w = 1; w <= W; ++w) {
      aux.nodes.push_back({AuxNodeKind::input_port, RouterId{n}, w});
      aux.nodes.push_back({AuxNodeKind::output_port, RouterId{n}, w});
    }
  aux.nodes.push_back({AuxNodeKind::source_terminal, s, 0});
  aux.nodes.push_back({AuxNodeKind::dest_terminal, d, 0});

  auto add = [&](std::uint32_t tail, std::uint32_t head, double cost, std::uint64_t secondary, std::uint32_t tag,
                 AuxEdgeKind kind) {
    aux.graph.add_edge(tail, head, cost, secondary, tag);
    aux.edge_kinds.push_back(kind);
  };

  for (const auto& r : topo.routers()) {
    const bool failed = ctx.state.router_failed(r.id);
    const double f_node = element_failure_probability(ctx, ElementRef::of(r.id), s, d);
    const double pass_cost = spn_passthrough_edge_cost(f_node, failed);
    const bool free_converter = ctx.state.converter_available(r.id);
    const double conv_cost =
        free_converter && !failed
            ? spn_converter_edge_cost(f_node, converter_repacking_probability(ctx, r.id), true, false,
                                      ctx.params.repack_threshold)
            : kInfiniteCost;
    for (Wavelength v = 1; v <= W; ++v)
      for (Wavelength w = 1; w <= W; ++w) {
        if (v == w)
          add(aux.input_port(r.id, v), aux.output_port(r.id, w), pass_cost, 0, r.id.value, AuxEdgeKind::passthrough);
        else
          add(aux.input_port(r.id, v), aux.output_port(r.id, w), conv_cost, 1, r.id.value, AuxEdgeKind::conversion);
      }
  }

  for (const auto& l : topo.links()) {
    const bool link_up = !ctx.state.link_failed(l.id);
    const double f_link = element_failure_probability(ctx, ElementRef::of(l.id), s, d);
    const double r_link = link_repacking_probability(ctx, l.id);
    for (Wavelength w = 1; w <= l.wavelengths; ++w) {
      const bool free = link_up && ctx.state.channel_free(l.id, w);
      add(aux.output_port(l.from, w), aux.input_port(l.to, w),
          spn_channel_edge_cost(f_link, r_link, free, ctx.params.repack_threshold), AuxGraph::kHopWeight, l.id.value,
          AuxEdgeKind::channel);
    }
  }

  for (Wavelength w = 1; w <= W; ++w)
    add(aux.source_terminal(), aux.input_port(s, w), 0.0, 0, s.value, AuxEdgeKind::source_attach);
  for (Wavelength w = 1; w <= W; ++w)
    add(aux.output_port(d, w), aux.dest_terminal(), 0.0, 0, d.value, AuxEdgeKind::dest_attach);
  return aux;
}

struct ExtractedPath {
  std::vector<Hop> hops;
  std::vector<Conversion> conversions;
};

/// Physical hops and conversions of the shortest r_s -> r_d path.
inline ExtractedPath extract_lightpath(const AuxGraph& aux, const ShortestPaths& sp) {
  if (sp.source != aux.source_terminal()) throw std::invalid_argument("extract_lightpath: paths not rooted at r_s");
  if (!sp.reachable(aux.dest_terminal()))
    throw std::invalid_argument("extract_lightpath: destination terminal unreachable");
  ExtractedPath out;
  for (std::size_t ei : sp.path_edges(aux.graph, aux.dest_terminal())) {
    const auto& e = aux.graph.edge(ei);
    switch (aux.edge_kinds[ei]) {
      case AuxEdgeKind::channel:
        out.hops.push_back({LinkId{e.tag}, aux.nodes[e.tail].wavelength});
        break;
      case AuxEdgeKind::conversion:
        out.conversions.push_back({RouterId{e.tag}, aux.nodes[e.tail].wavelength, aux.nodes[e.head].wavelength});
        break;
      default:
        break;
    }
  }
  if (out.hops.empty()) throw std::invalid_argument("extract_lightpath: path has no channel hop");
  return out;
}

inline std::string_view to_string(AuxEdgeKind k) {
  switch (k) {
    case AuxEdgeKind::channel: return "channel";
    case AuxEdgeKind::conversion: return "conversion";
    case AuxEdgeKind::passthrough: return "passthrough";
    case AuxEdgeKind::source_attach: return "source_attach";
    case AuxEdgeKind::dest_attach: return "dest_attach";
  }
  return "?";
}

/// Graphviz DOT rendering. Node names: i_<router>_<w>, o_<router>_<w>,
/// r_s, r_d. Edge labels carry kind and cost; infinite edges are dashed.
inline std::string to_dot(const AuxGraph& aux, const Topology& topo) {
  std::ostringstream os;
  os.precision(6);
  auto name = [&](std::uint32_t i) {
    const auto& n = aux.nodes[i];
    switch (n.kind) {
      case AuxNodeKind::input_port: return "i_" + topo.label(n.router) + "_" + std::to_string(n.wavelength);
      case AuxNodeKind::output_port: return "o_" + topo.label(n.router) + "_" + std::to_string(n.wavelength);
      case AuxNodeKind::source_terminal: return std::string("r_s");
      case AuxNodeKind::dest_terminal: return std::string("r_d");
    }
    return std::string("?");
  };
  os << "digraph aux {\n  // request " << topo.label(aux.source) << " -> " << topo.label(aux.destination) << "\n";
  for (std::uint32_t i = 0; i < aux.nodes.size(); ++i) os << "  \"" << name(i) << "\";\n";
  for (std::size_t i = 0; i < aux.graph.edges().size(); ++i) {
    const auto& e = aux.graph.edge(i);
    os << "  \"" << name(e.tail) << "\" -> \"" << name(e.head) << "\" [label=\"" << to_string(aux.edge_kinds[i])
       << ' ';
    if (std::isinf(e.cost))
      os << "inf\", style=dashed";
    else
      os << e.cost << '"';
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace lightroute
