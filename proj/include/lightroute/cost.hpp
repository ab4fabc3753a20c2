#pragma once

// Reconfiguration probabilities and the log-survival costs built on them.
// All functions are pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lightroute {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Repacking probabilities above this make an edge unusable.
inline constexpr double kDefaultRepackThreshold = 0.5;

/// Failure inter-arrival moments of one element. An infinite mean means the
/// element never fails.
struct FailureStats {
  double mu_f = std::numeric_limits<double>::infinity();
  double var_f = 0.0;
};

/// Holding-time moments for a source/destination pair.
struct HoldingStats {
  double mu_h = 1.0;
  double var_h = 1.0;
};

/// Chebyshev-type upper bound on the probability that the element fails
/// before a lightpath of the given holding statistics departs, clamped to 1.
/// Returns 1 for a broken or full element and whenever mu_f <= mu_h.
inline double tchebycheff_failure_probability(const FailureStats& fs, const HoldingStats& hs,
                                              bool broken_or_full = false) {
  if (broken_or_full) return 1.0;
  if (std::isinf(fs.mu_f)) return 0.0;
  const double gap = fs.mu_f - hs.mu_h;
  if (!(gap > 0.0)) return 1.0;
  const double gap2 = gap * gap;
  const double bound = fs.var_f / (2.0 * gap2) * (1.0 + 3.0 * hs.var_h / gap2);
  return std::min(1.0, bound);
}

/// P(failure before departure) for exponential failure and holding times.
inline double exact_failure_probability_exponential(double mu_f, double mu_h) {
  if (!(mu_f > 0.0) || !(mu_h > 0.0))
    throw std::invalid_argument("exact_failure_probability_exponential: means must be positive");
  if (std::isinf(mu_f)) return 0.0;
  return mu_h / (mu_f + mu_h);
}

/// -ln(1 - p); +inf at p = 1.
inline double element_cost(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("element_cost: probability outside [0,1]");
  if (p == 1.0) return kInfiniteCost;
  return -std::log1p(-p);
}

/// Cost of a link plus its head router: -ln[(1-p)(1-q)].
inline double combined_link_cost(double p_link, double q_router) {
  return element_cost(p_link) + element_cost(q_router);
}

/// Erlang-B loss E(n, rho) by the standard recursion.
inline double erlang_b(std::uint32_t servers, double rho) {
  if (!(rho >= 0.0) || std::isinf(rho)) throw std::invalid_argument("erlang_b: offered load must be finite and >= 0");
  double e = 1.0;
  for (std::uint32_t k = 1; k <= servers; ++k) e = rho * e / (static_cast<double>(k) + rho * e);
  return e;
}

/// E(x, rho) / (x * E(x0, rho)) clamped to [0, 1]; x busy units, x0 bank size.
inline double repacking_probability(std::uint32_t busy, std::uint32_t bank_size, double rho) {
  if (busy == 0) return 0.0;
  if (bank_size == 0) throw std::invalid_argument("repacking_probability: bank size must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("repacking_probability: offered load must be > 0");
  if (busy == bank_size) return 1.0 / static_cast<double>(busy);
  const double r = erlang_b(busy, rho) / (static_cast<double>(busy) * erlang_b(bank_size, rho));
  return std::clamp(r, 0.0, 1.0);
}

/// Maps a repacking probability above the threshold to 1 (cost +inf).
inline double apply_repack_threshold(double r, double threshold = kDefaultRepackThreshold) {
  return r > threshold ? 1.0 : r;
}

/// Router-graph edge: -ln(1-F_ij) - ln(1-F_j) - ln(1-R_ij).
inline double wi_edge_cost(double f_link, double f_router, double r_link) {
  return element_cost(f_link) + element_cost(f_router) + element_cost(r_link);
}

/// Channel edge (o_mw, i_nw) of the share-per-node graph.
inline double spn_channel_edge_cost(double f_link, double r_link, bool has_free_channel,
                                    double repack_threshold = kDefaultRepackThreshold) {
  if (!has_free_channel) return kInfiniteCost;
  return element_cost(f_link) + element_cost(apply_repack_threshold(r_link, repack_threshold));
}

/// Conversion edge (i_nv, o_nw), v != w.
inline double spn_converter_edge_cost(double f_node, double r_node, bool has_free_converter, bool node_failed,
                                      double repack_threshold = kDefaultRepackThreshold) {
  if (node_failed || !has_free_converter) return kInfiniteCost;
  return element_cost(f_node) + element_cost(apply_repack_threshold(r_node, repack_threshold));
}

/// Pass-through edge (i_nw, o_nw).
inline double spn_passthrough_edge_cost(double f_node, bool node_failed) {
  if (node_failed) return kInfiniteCost;
  return element_cost(f_node);
}

}  // namespace lightroute
