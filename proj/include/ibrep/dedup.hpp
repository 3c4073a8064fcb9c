#pragma once

#include "ibrep/indexed_brep.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace ibrep {

/// Simple undirected graph with string attributes on nodes and edges.
/// Parallel edges are merged; their attributes concatenate in sorted order.
struct AttributedGraph {
  std::vector<std::string> node_attrs;
  std::vector<std::tuple<int, int, std::string>> edges;  // a < b, unique pairs

  int num_nodes() const { return int(node_attrs.size()); }
  void add_edge(int a, int b, const std::string& attr);
};

/// 128-bit MurmurHash3 (x64 variant) of a byte string, rendered as 32
/// lowercase hex characters: h1 then h2, most significant byte first.
std::string murmur128_hex(const std::string& data, std::uint64_t seed = 0);

/// Weisfeiler-Lehman digest: nodes iteratively absorb their neighborhood
/// (edge attribute + neighbor label, sorted), and the graph digest is the
/// hash of the sorted multiset of final node labels. Invariant under node
/// reordering.
std::string wl_hash(const AttributedGraph& g, int iterations = 3);

/// Vertex adjacency graph: nodes are the B-rep vertices (arc midpoints are
/// folded into edge attributes, not nodes), attributed with their bin
/// triple; hyperedges become graph edges attributed "line" or
/// "arc:<mid z,y,x>".
AttributedGraph vertex_adjacency_graph(const IndexedBRep& b);

/// Face adjacency graph: nodes are faces attributed with the sorted
/// multiset of their edges' curve types; faces sharing >= 1 edge connect,
/// attributed with the shared-edge count.
AttributedGraph face_adjacency_graph(const IndexedBRep& b);

struct ContentHash {
  std::string face_graph_hash;
  std::string vertex_graph_hash;

  std::string combined() const { return face_graph_hash + vertex_graph_hash; }
};

ContentHash content_hash(const IndexedBRep& b, int wl_iterations = 3);

struct SampleRecord {
  IndexedBRep brep;
  bool valid = false;
};

struct Metrics {
  int total = 0;
  int valid = 0;
  int novel_count = 0;   // valid samples whose hash is not in the train set
  int unique_count = 0;  // distinct hashes among valid samples
  double valid_pct = 0;
  double novel_pct = 0;   // over valid samples
  double unique_pct = 0;  // over valid samples
  bool undefined = false;  // no samples, or no valid samples for the ratios
};

/// Valid / Novel / Unique. Novel and Unique are computed over the valid
/// samples only; a group of k identical valid samples contributes one
/// unique member.
Metrics compute_metrics(const std::vector<SampleRecord>& samples,
                        const std::set<std::string>& train_hashes);

}  // namespace ibrep
