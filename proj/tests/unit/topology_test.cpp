#include <gtest/gtest.h>

#include <set>
#include <string>

#include "lightroute/experiment.hpp"
#include "lightroute/topology.hpp"

using namespace lightroute;

namespace {

Topology example6() { return parse_topology(read_file(LIGHTROUTE_DATA_DIR "/example6.topo")); }

}  // namespace

TEST(ParseTopology, MinimalFile) {
  auto t = parse_topology("router A\nrouter B\nlink A B wavelengths=3\n");
  EXPECT_EQ(t.router_count(), 2u);
  ASSERT_EQ(t.link_count(), 1u);
  EXPECT_EQ(t.links()[0].capacity(), 3u);
  EXPECT_EQ(t.mode(), ConversionMode::full_conversion);
}

TEST(ParseTopology, ExampleNetwork) {
  auto t = example6();
  EXPECT_EQ(t.router_count(), 6u);
  EXPECT_EQ(t.link_count(), 13u);
  EXPECT_EQ(t.max_wavelengths(), 3u);
  EXPECT_EQ(t.total_fibers(), 13u);
  for (const auto& l : t.links()) EXPECT_EQ(l.fibers, 1u);
}

TEST(ParseTopology, DanglingEndpointReportsLine) {
  try {
    parse_topology("router A\n\nlink A Z wavelengths=2\n");
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
}

TEST(ParseTopology, RejectsMalformedInput) {
  EXPECT_THROW(parse_topology("router A\nrouter B\nlink A B\n"), TopologyError);               // no wavelengths
  EXPECT_THROW(parse_topology("router A\nlink A A wavelengths=1\n"), TopologyError);           // self-loop
  EXPECT_THROW(parse_topology("router A\nrouter A\n"), TopologyError);                         // duplicate
  EXPECT_THROW(parse_topology("router A\nrouter B\nlink A B wavelengths=0\n"), TopologyError);
  EXPECT_THROW(parse_topology("router A\nrouter B\nlink A B wavelengths=2 fibers=0\n"), TopologyError);
  EXPECT_THROW(parse_topology("router A\nrouter B\nlink A B wavelengths=2\nlink A B wavelengths=2\n"),
               TopologyError);
  EXPECT_THROW(parse_topology("mode sometimes\n"), TopologyError);
  EXPECT_THROW(parse_topology("router A colour=red\n"), TopologyError);
  EXPECT_THROW(parse_topology("switch A\n"), TopologyError);
  EXPECT_THROW(parse_topology("router A converters=-1\n"), TopologyError);
}

TEST(ParseTopology, AttributesAndComments) {
  auto t = parse_topology(
      "# header\nmode spn\nrouter A converters=2 class=unreliable  # trailing\nrouter B\n"
      "link A B fibers=2 wavelengths=4 class=unreliable\n");
  EXPECT_EQ(t.mode(), ConversionMode::share_per_node);
  EXPECT_EQ(t.router(RouterId{0}).converter_count, 2u);
  EXPECT_EQ(t.router(RouterId{0}).reliability, ReliabilityClass::unreliable);
  EXPECT_EQ(t.router(RouterId{1}).reliability, ReliabilityClass::reliable);
  EXPECT_EQ(t.link(LinkId{0}).capacity(), 8u);
  EXPECT_EQ(t.link(LinkId{0}).reliability, ReliabilityClass::unreliable);
}

TEST(Topology, SerializeRoundTrip) {
  auto t = example6();
  t.set_mode(ConversionMode::share_per_node);
  t.set_router_class(RouterId{2}, ReliabilityClass::unreliable);
  t.set_link_class(LinkId{7}, ReliabilityClass::unreliable);
  auto back = parse_topology(serialize_topology(t));
  EXPECT_TRUE(back == t);
  EXPECT_EQ(serialize_topology(back), serialize_topology(t));
}

TEST(Neighbors, EmptyForSink) {
  auto t = parse_topology("router A\nrouter B\nlink A B wavelengths=3\n");
  EXPECT_TRUE(neighbors(t, t.router_id("B")).empty());
  auto n = neighbors(t, t.router_id("A"));
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].head, t.router_id("B"));
}

TEST(Neighbors, MatchesDeclaredOutLinks) {
  auto t = example6();
  std::set<std::string> heads;
  for (const auto& n : neighbors(t, t.router_id("A"))) heads.insert(t.label(n.head));
  EXPECT_EQ(heads, (std::set<std::string>{"B", "F"}));
  std::set<std::string> from_b;
  for (const auto& n : neighbors(t, t.router_id("B"))) from_b.insert(t.label(n.head));
  EXPECT_EQ(from_b, (std::set<std::string>{"A", "C", "E"}));
}

TEST(Neighbors, UnionIsLinkSetWithoutRepeats) {
  auto t = example6();
  std::multiset<std::uint32_t> seen;
  for (const auto& r : t.routers())
    for (const auto& n : neighbors(t, r.id)) {
      seen.insert(n.link.value);
      EXPECT_EQ(t.link(n.link).from, r.id);
      EXPECT_EQ(t.link(n.link).to, n.head);
    }
  ASSERT_EQ(seen.size(), t.link_count());
  for (std::uint32_t i = 0; i < t.link_count(); ++i) EXPECT_EQ(seen.count(i), 1u);
}
