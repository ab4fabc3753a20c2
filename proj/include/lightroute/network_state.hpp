#pragma once

// Mutable occupancy of a topology: channels per (link, wavelength),
// converters per router, transient failure flags and active lightpaths.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightroute/errors.hpp"
#include "lightroute/topology.hpp"

namespace lightroute {

struct Hop {
  LinkId link;
  Wavelength wavelength = 1;
  friend bool operator==(const Hop&, const Hop&) = default;
};

struct Conversion {
  RouterId router;
  Wavelength from = 1;
  Wavelength to = 1;
  friend bool operator==(const Conversion&, const Conversion&) = default;
};

struct Lightpath {
  std::uint64_t id = 0;
  RouterId source;
  RouterId destination;
  std::vector<Hop> hops;
  std::vector<Conversion> conversions;
  double arrival_time = 0.0;
  double departure_time = 0.0;
  bool counted = false;    // accepted after warm-up
  bool displaced = false;  // already hit by a failure once
};

/// A failable network element.
struct ElementRef {
  enum class Kind : std::uint8_t { link, router };
  Kind kind = Kind::link;
  std::uint32_t index = 0;

  static ElementRef of(LinkId l) { return {Kind::link, l.value}; }
  static ElementRef of(RouterId r) { return {Kind::router, r.value}; }
  friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

class NetworkState {
 public:
  explicit NetworkState(const Topology& topology)
      : topo_(&topology),
        link_failed_(topology.link_count(), false),
        router_failed_(topology.router_count(), false),
        converters_in_use_(topology.router_count(), 0) {
    occupancy_.reserve(topology.link_count());
    for (const auto& l : topology.links()) occupancy_.emplace_back(l.wavelengths, 0u);
  }

  [[nodiscard]] const Topology& topology() const { return *topo_; }
  [[nodiscard]] bool full_conversion() const { return topo_->mode() == ConversionMode::full_conversion; }

  /// Fibers of `link` carrying wavelength `w`.
  [[nodiscard]] std::uint32_t occupied(LinkId link, Wavelength w) const {
    const auto& row = occupancy_.at(link.index());
    if (w < 1 || w > row.size()) return topo_->link(link).fibers;
    return row[w - 1];
  }

  [[nodiscard]] bool channel_free(LinkId link, Wavelength w) const {
    const auto& l = topo_->link(link);
    return w >= 1 && w <= l.wavelengths && occupancy_[link.index()][w - 1] < l.fibers;
  }

  [[nodiscard]] std::uint32_t occupied_channels(LinkId link) const {
    std::uint32_t n = 0;
    for (auto c : occupancy_.at(link.index())) n += c;
    return n;
  }

  [[nodiscard]] std::uint32_t free_channels(LinkId link) const {
    return topo_->link(link).capacity() - occupied_channels(link);
  }

  /// Wavelengths with at least one free fiber on `link`, ascending.
  [[nodiscard]] std::vector<Wavelength> free_wavelengths(LinkId link) const {
    std::vector<Wavelength> out;
    const auto& l = topo_->link(link);
    for (Wavelength w = 1; w <= l.wavelengths; ++w)
      if (occupancy_[link.index()][w - 1] < l.fibers) out.push_back(w);
    return out;
  }

  [[nodiscard]] std::uint32_t converters_in_use(RouterId r) const { return converters_in_use_.at(r.index()); }

  /// Always true with full conversion; otherwise requires a free bank unit.
  [[nodiscard]] bool converter_available(RouterId r) const {
    if (full_conversion()) return true;
    return converters_in_use_.at(r.index()) < topo_->router(r).converter_count;
  }

  [[nodiscard]] bool failed(ElementRef e) const {
    return e.kind == ElementRef::Kind::link ? link_failed_.at(e.index) : router_failed_.at(e.index);
  }
  [[nodiscard]] bool link_failed(LinkId l) const { return link_failed_.at(l.index()); }
  [[nodiscard]] bool router_failed(RouterId r) const { return router_failed_.at(r.index()); }

  void set_failed(ElementRef e, bool value) {
    if (e.kind == ElementRef::Kind::link)
      link_failed_.at(e.index) = value;
    else
      router_failed_.at(e.index) = value;
  }

  /// Link is usable: not failed, both endpoints up, one channel free.
  [[nodiscard]] bool link_usable(LinkId link) const {
    const auto& l = topo_->link(link);
    return !link_failed_[link.index()] && !router_failed_[l.from.index()] && !router_failed_[l.to.index()] &&
           free_channels(link) > 0;
  }

  /// Marks the lightpath's channels and converters busy and records it as active.
  void establish(const Lightpath& lp) {
    for (const auto& h : lp.hops) {
      if (!channel_free(h.link, h.wavelength))
        throw InvariantViolation("establish: channel " + std::to_string(h.link.value) + "/" +
                                 std::to_string(h.wavelength) + " is not free");
    }
    if (!full_conversion()) {
      for (const auto& c : lp.conversions)
        if (!converter_available(c.router))
          throw InvariantViolation("establish: no free converter at router " + std::to_string(c.router.value));
    }
    if (active_.contains(lp.id)) throw InvariantViolation("establish: duplicate lightpath id");
    for (const auto& h : lp.hops) ++occupancy_[h.link.index()][h.wavelength - 1];
    if (!full_conversion())
      for (const auto& c : lp.conversions) ++converters_in_use_[c.router.index()];
    active_.emplace(lp.id, lp);
  }

  /// Releases resources of an active lightpath and returns it.
  Lightpath release(std::uint64_t id) {
    auto it = active_.find(id);
    if (it == active_.end()) throw InvariantViolation("release: unknown lightpath " + std::to_string(id));
    Lightpath lp = std::move(it->second);
    active_.erase(it);
    for (const auto& h : lp.hops) {
      auto& slot = occupancy_[h.link.index()][h.wavelength - 1];
      if (slot == 0) throw InvariantViolation("release: channel underflow");
      --slot;
    }
    if (!full_conversion()) {
      for (const auto& c : lp.conversions) {
        auto& n = converters_in_use_[c.router.index()];
        if (n == 0) throw InvariantViolation("release: converter underflow");
        --n;
      }
    }
    return lp;
  }

  [[nodiscard]] const std::map<std::uint64_t, Lightpath>& active() const { return active_; }
  [[nodiscard]] bool is_active(std::uint64_t id) const { return active_.contains(id); }

  /// Ids of active lightpaths traversing `e`, ascending.
  [[nodiscard]] std::vector<std::uint64_t> lightpaths_through(ElementRef e) const {
    std::vector<std::uint64_t> out;
    for (const auto& [id, lp] : active_) {
      bool hit = false;
      for (const auto& h : lp.hops) {
        const auto& l = topo_->link(h.link);
        if (e.kind == ElementRef::Kind::link ? h.link.value == e.index
                                              : (l.from.value == e.index || l.to.value == e.index)) {
          hit = true;
          break;
        }
      }
      if (hit) out.push_back(id);
    }
    return out;
  }

  /// Recounts occupancy from the active set; throws on any mismatch.
  void check_conservation() const {
    std::vector<std::vector<std::uint32_t>> expect;
    for (const auto& l : topo_->links()) expect.emplace_back(l.wavelengths, 0u);
    std::vector<std::uint32_t> conv(topo_->router_count(), 0);
    for (const auto& [id, lp] : active_) {
      for (const auto& h : lp.hops) ++expect[h.link.index()][h.wavelength - 1];
      for (const auto& c : lp.conversions) ++conv[c.router.index()];
    }
    if (expect != occupancy_) throw InvariantViolation("channel conservation violated");
    for (const auto& l : topo_->links())
      for (auto n : occupancy_[l.id.index()])
        if (n > l.fibers) throw InvariantViolation("channel over-subscribed");
    if (!full_conversion()) {
      if (conv != converters_in_use_) throw InvariantViolation("converter conservation violated");
      for (const auto& r : topo_->routers())
        if (converters_in_use_[r.id.index()] > r.converter_count)
          throw InvariantViolation("converter bank over-subscribed");
    }
  }

 private:
  const Topology* topo_;
  std::vector<std::vector<std::uint32_t>> occupancy_;
  std::vector<bool> link_failed_;
  std::vector<bool> router_failed_;
  std::vector<std::uint32_t> converters_in_use_;
  std::map<std::uint64_t, Lightpath> active_;
};

}  // namespace lightroute
