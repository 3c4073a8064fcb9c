#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibrep/dedup.hpp"
#include "ibrep/fixtures.hpp"

#include "brep_test_util.hpp"

using namespace ibrep;
using testutil::hand_cube;
using testutil::shuffle_brep;

TEST_CASE("murmur digest") {
  // Reference value of the x64 128-bit variant: empty input, zero seed.
  CHECK(murmur128_hex("") == "00000000000000000000000000000000");
  CHECK(murmur128_hex("a") == murmur128_hex("a"));
  CHECK(murmur128_hex("a") != murmur128_hex("b"));
  CHECK(murmur128_hex("abc", 1) != murmur128_hex("abc", 2));
  CHECK(murmur128_hex("The quick brown fox").size() == 32);
}

TEST_CASE("vertex adjacency graph") {
  SUBCASE("cube") {
    const AttributedGraph g = vertex_adjacency_graph(hand_cube(8, 40));
    CHECK(g.num_nodes() == 8);
    CHECK(g.edges.size() == 12);
    for (const auto& [a, b, attr] : g.edges) CHECK(attr == "line");
  }

  SUBCASE("single line edge") {
    IndexedBRep b;
    b.vertices = {{0, 0, 0}, {0, 0, 1}};
    b.edges = {{0, 1}};
    const AttributedGraph g = vertex_adjacency_graph(b);
    CHECK(g.num_nodes() == 2);
    CHECK(g.edges.size() == 1);
  }

  SUBCASE("arc midpoints become edge attributes, not nodes") {
    IndexedBRep raw;
    raw.vertices = {{0, 0, 5}, {0, 4, 3}, {0, 5, 0}};
    raw.edges = {{0, 1, 2}};
    const AttributedGraph g = vertex_adjacency_graph(canonicalize(raw));
    CHECK(g.num_nodes() == 2);  // the geometric midpoint (0,4,3) is folded in
    REQUIRE(g.edges.size() == 1);
    CHECK(std::get<2>(g.edges[0]) == "arc:0,4,3");
  }
}

TEST_CASE("face adjacency graph") {
  SUBCASE("cube") {
    const AttributedGraph g = face_adjacency_graph(hand_cube());
    CHECK(g.num_nodes() == 6);
    CHECK(g.edges.size() == 12);  // each face touches four neighbors
    for (const auto& attr : g.node_attrs) CHECK(attr == "line,line,line,line");
  }

  SUBCASE("two disjoint faces") {
    IndexedBRep b;
    b.vertices = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}};
    b.edges = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
    b.faces = {{0, 1, 2}, {3, 4, 5}};
    const AttributedGraph g = face_adjacency_graph(b);
    CHECK(g.num_nodes() == 2);
    CHECK(g.edges.empty());
  }

  SUBCASE("two faces sharing two edges") {
    IndexedBRep b;
    b.vertices = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}};
    b.edges = {{0, 1}, {0, 2}};
    b.faces = {{0, 1}, {0, 1}};  // a closed two-edge ribbon, listed twice
    const AttributedGraph g = face_adjacency_graph(b);
    REQUIRE(g.edges.size() == 1);
    CHECK(std::get<2>(g.edges[0]) == "2");
  }
}

TEST_CASE("weisfeiler-lehman hashing") {
  SUBCASE("isomorphic graphs hash equally under node permutation") {
    AttributedGraph a;
    a.node_attrs = {"x", "y", "z"};
    a.add_edge(0, 1, "p");
    a.add_edge(1, 2, "q");
    AttributedGraph b;  // same graph, ids rotated
    b.node_attrs = {"z", "x", "y"};
    b.add_edge(1, 2, "p");
    b.add_edge(2, 0, "q");
    CHECK(wl_hash(a) == wl_hash(b));
  }

  SUBCASE("a changed node attribute changes the hash") {
    AttributedGraph a;
    a.node_attrs = {"x", "y"};
    a.add_edge(0, 1, "p");
    AttributedGraph b = a;
    b.node_attrs[1] = "w";
    CHECK(wl_hash(a) != wl_hash(b));
  }

  SUBCASE("a changed edge attribute changes the hash") {
    AttributedGraph a;
    a.node_attrs = {"x", "y"};
    a.add_edge(0, 1, "p");
    AttributedGraph b;
    b.node_attrs = {"x", "y"};
    b.add_edge(0, 1, "q");
    CHECK(wl_hash(a) != wl_hash(b));
  }

  SUBCASE("empty graph hashes to a fixed constant") {
    const AttributedGraph e1, e2;
    CHECK(wl_hash(e1) == wl_hash(e2));
    AttributedGraph one;
    one.node_attrs = {"x"};
    CHECK(wl_hash(e1) != wl_hash(one));
  }

  SUBCASE("refinement never re-merges hashes split at fewer iterations") {
    std::vector<IndexedBRep> family;
    for (fixtures::Family f : fixtures::kAllFamilies)
      for (int i = 0; i < 3; ++i)
        family.push_back(fixtures::make(f, 5, i).brep);
    for (int k = 1; k < 4; ++k) {
      for (size_t i = 0; i < family.size(); ++i) {
        for (size_t j = i + 1; j < family.size(); ++j) {
          const AttributedGraph gi = vertex_adjacency_graph(family[i]);
          const AttributedGraph gj = vertex_adjacency_graph(family[j]);
          if (wl_hash(gi, k) != wl_hash(gj, k))
            CHECK(wl_hash(gi, k + 1) != wl_hash(gj, k + 1));
        }
      }
    }
  }
}

TEST_CASE("content hashing") {
  SUBCASE("pre-canonicalization permutations hash identically") {
    const IndexedBRep cube = hand_cube(8, 40);
    const std::string ref = content_hash(cube).combined();
    CHECK(ref.size() == 64);
    auto rng = testutil::test_rng(3);
    for (int trial = 0; trial < 30; ++trial)
      CHECK(content_hash(canonicalize(shuffle_brep(cube, rng))).combined() == ref);
  }

  SUBCASE("translation by one bin changes the hash") {
    CHECK(content_hash(hand_cube(8, 40)).combined() !=
          content_hash(hand_cube(9, 41)).combined());
  }

  SUBCASE("same topology with different extents differs") {
    CHECK(content_hash(hand_cube(8, 40)).combined() !=
          content_hash(hand_cube(8, 41)).combined());
  }

  SUBCASE("combined is the concatenation") {
    const ContentHash h = content_hash(hand_cube());
    CHECK(h.combined() == h.face_graph_hash + h.vertex_graph_hash);
  }
}

TEST_CASE("metrics") {
  const IndexedBRep box_a = fixtures::make(fixtures::Family::Box, 1, 0).brep;
  const IndexedBRep fillet_b = fixtures::make(fixtures::Family::Fillet, 1, 0).brep;
  const IndexedBRep cone_c = fixtures::make(fixtures::Family::Cone, 1, 0).brep;
  const IndexedBRep octant_d = fixtures::make(fixtures::Family::Sphere, 1, 0).brep;

  SUBCASE("all valid, novel, distinct") {
    std::vector<SampleRecord> samples = {
        {box_a, true}, {fillet_b, true}, {cone_c, true}};
    const Metrics m = compute_metrics(samples, {});
    CHECK(m.valid_pct == doctest::Approx(100.0));
    CHECK(m.novel_pct == doctest::Approx(100.0));
    CHECK(m.unique_pct == doctest::Approx(100.0));
  }

  SUBCASE("hand-computed half-valid scenario") {
    // 10 samples, 5 valid. Among the valid: one duplicated pair (4 distinct
    // hashes) and one training-set match.
    std::set<std::string> train = {content_hash(octant_d).combined()};
    std::vector<SampleRecord> samples = {
        {box_a, true},     {box_a, true},     {fillet_b, true},
        {cone_c, true},    {octant_d, true},  {box_a, false},
        {fillet_b, false}, {cone_c, false},   {octant_d, false},
        {IndexedBRep{}, false}};
    const Metrics m = compute_metrics(samples, train);
    CHECK(m.total == 10);
    CHECK(m.valid == 5);
    CHECK(m.valid_pct == doctest::Approx(50.0));
    CHECK(m.novel_count == 4);
    CHECK(m.novel_pct == doctest::Approx(80.0));
    CHECK(m.unique_count == 4);
    CHECK(m.unique_pct == doctest::Approx(80.0));
  }

  SUBCASE("empty input is undefined") {
    const Metrics m = compute_metrics({}, {});
    CHECK(m.undefined);
    CHECK(m.valid_pct == 0.0);
    CHECK(m.novel_pct == 0.0);
    CHECK(m.unique_pct == 0.0);
  }

  SUBCASE("sample order does not matter") {
    std::vector<SampleRecord> samples = {
        {box_a, true}, {fillet_b, true}, {cone_c, false}, {box_a, true}};
    std::set<std::string> train = {content_hash(fillet_b).combined()};
    const Metrics fwd = compute_metrics(samples, train);
    std::reverse(samples.begin(), samples.end());
    const Metrics rev = compute_metrics(samples, train);
    CHECK(fwd.valid == rev.valid);
    CHECK(fwd.novel_count == rev.novel_count);
    CHECK(fwd.unique_count == rev.unique_count);
  }
}
