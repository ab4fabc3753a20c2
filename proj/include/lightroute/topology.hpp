#pragma once

// Network model: routers, directed links, converter banks and the
// line-oriented topology file format.
//
// File grammar (one statement per line, `#` starts a comment):
//
//   mode <wi|spn>
//   router <label> [converters=<int>] [class=<reliable|unreliable>]
//   link <from> <to> wavelengths=<int> [fibers=<int>] [class=<reliable|unreliable>]
//
// Labels are case-sensitive and may not contain whitespace or '='. Router
// ids follow declaration order, link ids likewise. Links may reference
// routers declared later in the file.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lightroute {

/// Strongly typed index. Tag keeps RouterId and LinkId from mixing.
template <typename Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit Id(int v) : value(static_cast<std::uint32_t>(v)) {}

  [[nodiscard]] constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(Id, Id) = default;
};

using RouterId = Id<struct RouterTag>;
using LinkId = Id<struct LinkTag>;

/// 1-based wavelength index, valid range [1, W].
using Wavelength = std::uint32_t;

enum class ReliabilityClass { reliable, unreliable };
enum class ConversionMode { full_conversion, share_per_node };

struct Router {
  RouterId id;
  std::string label;
  std::uint32_t converter_count = 0;
  ReliabilityClass reliability = ReliabilityClass::reliable;
};

struct Link {
  LinkId id;
  RouterId from;
  RouterId to;
  std::uint32_t fibers = 1;
  std::uint32_t wavelengths = 1;
  ReliabilityClass reliability = ReliabilityClass::reliable;

  /// Total channel capacity c_r.
  [[nodiscard]] std::uint32_t capacity() const { return fibers * wavelengths; }
};

class TopologyError : public std::runtime_error {
 public:
  TopologyError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 0 when the error is not tied to a specific line.
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class Topology {
 public:
  Topology() = default;

  RouterId add_router(std::string label, std::uint32_t converters = 0,
                      ReliabilityClass cls = ReliabilityClass::reliable) {
    if (label.empty()) throw TopologyError(0, "empty router label");
    if (by_label_.contains(label)) throw TopologyError(0, "duplicate router '" + label + "'");
    RouterId id{routers_.size()};
    by_label_.emplace(label, id);
    routers_.push_back(Router{id, std::move(label), converters, cls});
    out_links_.emplace_back();
    return id;
  }

  LinkId add_link(RouterId from, RouterId to, std::uint32_t wavelengths, std::uint32_t fibers = 1,
                  ReliabilityClass cls = ReliabilityClass::reliable) {
    if (from.index() >= routers_.size() || to.index() >= routers_.size())
      throw TopologyError(0, "link endpoint does not name a router");
    if (from == to) throw TopologyError(0, "self-loop link at '" + label(from) + "'");
    if (wavelengths == 0) throw TopologyError(0, "wavelengths must be positive");
    if (fibers == 0) throw TopologyError(0, "fibers must be positive");
    for (LinkId l : out_links_[from.index()])
      if (links_[l.index()].to == to)
        throw TopologyError(0, "duplicate link " + label(from) + " -> " + label(to));
    LinkId id{links_.size()};
    links_.push_back(Link{id, from, to, fibers, wavelengths, cls});
    out_links_[from.index()].push_back(id);
    return id;
  }

  [[nodiscard]] const std::vector<Router>& routers() const { return routers_; }
  [[nodiscard]] const std::vector<Link>& links() const { return links_; }
  [[nodiscard]] std::size_t router_count() const { return routers_.size(); }
  [[nodiscard]] std::size_t link_count() const { return links_.size(); }

  [[nodiscard]] const Router& router(RouterId id) const { return routers_.at(id.index()); }
  [[nodiscard]] const Link& link(LinkId id) const { return links_.at(id.index()); }
  [[nodiscard]] const std::string& label(RouterId id) const { return router(id).label; }

  [[nodiscard]] std::optional<RouterId> find_router(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] RouterId router_id(std::string_view label) const {
    auto id = find_router(label);
    if (!id) throw TopologyError(0, "unknown router '" + std::string(label) + "'");
    return *id;
  }

  /// Out-links of `r` in link-id order.
  [[nodiscard]] const std::vector<LinkId>& out_links(RouterId r) const {
    if (r.index() >= routers_.size()) throw TopologyError(0, "unknown router id");
    return out_links_[r.index()];
  }

  /// Largest per-fiber wavelength count over all links (0 for no links).
  [[nodiscard]] std::uint32_t max_wavelengths() const {
    std::uint32_t w = 0;
    for (const auto& l : links_) w = std::max(w, l.wavelengths);
    return w;
  }

  [[nodiscard]] std::uint32_t total_fibers() const {
    std::uint32_t n = 0;
    for (const auto& l : links_) n += l.fibers;
    return n;
  }

  [[nodiscard]] ConversionMode mode() const { return mode_; }
  void set_mode(ConversionMode m) { mode_ = m; }

  void set_router_class(RouterId r, ReliabilityClass c) { routers_.at(r.index()).reliability = c; }
  void set_link_class(LinkId l, ReliabilityClass c) { links_.at(l.index()).reliability = c; }
  void set_converter_count(RouterId r, std::uint32_t n) { routers_.at(r.index()).converter_count = n; }

  friend bool operator==(const Topology& a, const Topology& b) {
    auto router_eq = [](const Router& x, const Router& y) {
      return x.id == y.id && x.label == y.label && x.converter_count == y.converter_count &&
             x.reliability == y.reliability;
    };
    auto link_eq = [](const Link& x, const Link& y) {
      return x.id == y.id && x.from == y.from && x.to == y.to && x.fibers == y.fibers &&
             x.wavelengths == y.wavelengths && x.reliability == y.reliability;
    };
    return a.mode_ == b.mode_ && std::ranges::equal(a.routers_, b.routers_, router_eq) &&
           std::ranges::equal(a.links_, b.links_, link_eq);
  }

 private:
  std::vector<Router> routers_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_links_;
  std::map<std::string, RouterId, std::less<>> by_label_;
  ConversionMode mode_ = ConversionMode::full_conversion;
};

struct Neighbor {
  LinkId link;
  RouterId head;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// All out-links of `r` with their heads, in link-id order.
inline std::vector<Neighbor> neighbors(const Topology& topology, RouterId r) {
  std::vector<Neighbor> out;
  for (LinkId l : topology.out_links(r)) out.push_back({l, topology.link(l).to});
  return out;
}

inline std::string_view to_string(ReliabilityClass c) {
  return c == ReliabilityClass::reliable ? "reliable" : "unreliable";
}

inline std::string_view to_string(ConversionMode m) {
  return m == ConversionMode::full_conversion ? "wi" : "spn";
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<ReliabilityClass> parse_class(std::string_view v) {
  if (v == "reliable") return ReliabilityClass::reliable;
  if (v == "unreliable") return ReliabilityClass::unreliable;
  return std::nullopt;
}

inline std::optional<long long> parse_int(std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) return std::nullopt;
  return out;
}

}  // namespace detail

/// Parses and validates a topology file. Throws TopologyError with the
/// offending line number.
inline Topology parse_topology(std::string_view text) {
  struct PendingLink {
    std::size_t line;
    std::string from, to;
    long long fibers = 1, wavelengths = -1;
    ReliabilityClass cls = ReliabilityClass::reliable;
  };

  Topology topo;
  std::vector<PendingLink> pending;
  bool mode_seen = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;

    auto kv = [&](std::string_view t) -> std::pair<std::string_view, std::string_view> {
      auto eq = t.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == t.size())
        throw TopologyError(line_no, "expected key=value, got '" + std::string(t) + "'");
      return {t.substr(0, eq), t.substr(eq + 1)};
    };
    auto int_value = [&](std::string_view key, std::string_view v) {
      auto n = detail::parse_int(v);
      if (!n) throw TopologyError(line_no, "invalid integer for " + std::string(key) + ": '" + std::string(v) + "'");
      return *n;
    };
    auto class_value = [&](std::string_view v) {
      auto c = detail::parse_class(v);
      if (!c) throw TopologyError(line_no, "invalid class '" + std::string(v) + "'");
      return *c;
    };
    auto check_label = [&](std::string_view l) {
      if (l.find('=') != std::string_view::npos)
        throw TopologyError(line_no, "label may not contain '=': '" + std::string(l) + "'");
    };

    if (tok[0] == "mode") {
      if (tok.size() != 2) throw TopologyError(line_no, "mode takes exactly one argument");
      if (mode_seen) throw TopologyError(line_no, "duplicate mode statement");
      mode_seen = true;
      if (tok[1] == "wi")
        topo.set_mode(ConversionMode::full_conversion);
      else if (tok[1] == "spn")
        topo.set_mode(ConversionMode::share_per_node);
      else
        throw TopologyError(line_no, "unknown mode '" + std::string(tok[1]) + "'");
    } else if (tok[0] == "router") {
      if (tok.size() < 2) throw TopologyError(line_no, "router needs a label");
      check_label(tok[1]);
      long long converters = 0;
      ReliabilityClass cls = ReliabilityClass::reliable;
      for (std::size_t i = 2; i < tok.size(); ++i) {
        auto [k, v] = kv(tok[i]);
        if (k == "converters") {
          converters = int_value(k, v);
          if (converters < 0) throw TopologyError(line_no, "converters must be nonnegative");
        } else if (k == "class") {
          cls = class_value(v);
        } else {
          throw TopologyError(line_no, "unknown router attribute '" + std::string(k) + "'");
        }
      }
      if (topo.find_router(tok[1]))
        throw TopologyError(line_no, "duplicate router '" + std::string(tok[1]) + "'");
      topo.add_router(std::string(tok[1]), static_cast<std::uint32_t>(converters), cls);
    } else if (tok[0] == "link") {
      if (tok.size() < 3) throw TopologyError(line_no, "link needs <from> <to>");
      PendingLink pl{line_no, std::string(tok[1]), std::string(tok[2])};
      for (std::size_t i = 3; i < tok.size(); ++i) {
        auto [k, v] = kv(tok[i]);
        if (k == "fibers") {
          pl.fibers = int_value(k, v);
        } else if (k == "wavelengths") {
          pl.wavelengths = int_value(k, v);
        } else if (k == "class") {
          pl.cls = class_value(v);
        } else {
          throw TopologyError(line_no, "unknown link attribute '" + std::string(k) + "'");
        }
      }
      if (pl.wavelengths == -1) throw TopologyError(line_no, "link is missing wavelengths=");
      if (pl.wavelengths <= 0) throw TopologyError(line_no, "wavelengths must be positive");
      if (pl.fibers <= 0) throw TopologyError(line_no, "fibers must be positive");
      pending.push_back(std::move(pl));
    } else {
      throw TopologyError(line_no, "unknown statement '" + std::string(tok[0]) + "'");
    }
    if (eol == text.size()) break;
  }

  for (const auto& pl : pending) {
    auto from = topo.find_router(pl.from);
    if (!from) throw TopologyError(pl.line, "link endpoint '" + pl.from + "' is not a declared router");
    auto to = topo.find_router(pl.to);
    if (!to) throw TopologyError(pl.line, "link endpoint '" + pl.to + "' is not a declared router");
    try {
      topo.add_link(*from, *to, static_cast<std::uint32_t>(pl.wavelengths),
                    static_cast<std::uint32_t>(pl.fibers), pl.cls);
    } catch (const TopologyError& e) {
      throw TopologyError(pl.line, e.what());
    }
  }
  return topo;
}

inline std::string serialize_topology(const Topology& topo) {
  std::ostringstream os;
  os << "mode " << to_string(topo.mode()) << '\n';
  for (const auto& r : topo.routers())
    os << "router " << r.label << " converters=" << r.converter_count << " class=" << to_string(r.reliability)
       << '\n';
  for (const auto& l : topo.links())
    os << "link " << topo.label(l.from) << ' ' << topo.label(l.to) << " fibers=" << l.fibers
       << " wavelengths=" << l.wavelengths << " class=" << to_string(l.reliability) << '\n';
  return os.str();
}

}  // namespace lightroute
