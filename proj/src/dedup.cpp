#include "ibrep/dedup.hpp"

#include "ibrep/geometry.hpp"

#include <algorithm>
#include <cstring>
#include <map>

namespace ibrep {

void AttributedGraph::add_edge(int a, int b, const std::string& attr) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  for (auto& [ea, eb, eattr] : edges) {
    if (ea == a && eb == b) {
      // Merge parallel edges into one attribute, order independent.
      std::vector<std::string> parts;
      size_t pos = 0;
      std::string joined = eattr + "|" + attr;
      while (pos != std::string::npos) {
        const size_t next = joined.find('|', pos);
        parts.push_back(joined.substr(pos, next - pos));
        pos = next == std::string::npos ? next : next + 1;
      }
      std::sort(parts.begin(), parts.end());
      eattr.clear();
      for (size_t i = 0; i < parts.size(); ++i)
        eattr += (i ? "|" : "") + parts[i];
      return;
    }
  }
  edges.push_back({a, b, attr});
}

// MurmurHash3_x64_128, public-domain algorithm by Austin Appleby.
namespace {

inline std::uint64_t rotl64(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

inline std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

void murmur128(const void* key, size_t len, std::uint64_t seed,
               std::uint64_t out[2]) {
  const std::uint8_t* data = static_cast<const std::uint8_t*>(key);
  const size_t nblocks = len / 16;

  std::uint64_t h1 = seed, h2 = seed;
  const std::uint64_t c1 = 0x87c37b91114253d5ull;
  const std::uint64_t c2 = 0x4cf5ad432745937full;

  for (size_t i = 0; i < nblocks; ++i) {
    std::uint64_t k1, k2;
    std::memcpy(&k1, data + i * 16, 8);
    std::memcpy(&k2, data + i * 16 + 8, 8);

    k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
    h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
    k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
    h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
  }

  const std::uint8_t* tail = data + nblocks * 16;
  std::uint64_t k1 = 0, k2 = 0;
  switch (len & 15) {
    case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
    case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
    case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
    case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
    case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
    case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
    case 9:
      k2 ^= std::uint64_t(tail[8]);
      k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
      [[fallthrough]];
    case 8: k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
    case 7: k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      k1 ^= std::uint64_t(tail[0]);
      k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
  }

  h1 ^= std::uint64_t(len);
  h2 ^= std::uint64_t(len);
  h1 += h2;
  h2 += h1;
  h1 = fmix64(h1);
  h2 = fmix64(h2);
  h1 += h2;
  h2 += h1;
  out[0] = h1;
  out[1] = h2;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string triple_str(const BinTriple& t) {
  return std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
         std::to_string(t[2]);
}

// The stored midpoint of an arc hyperedge, identified geometrically. Bin
// coordinates serve directly; the test only compares relative deviations,
// which scaling preserves.
int resolve_arc_mid(const IndexedBRep& b, const std::vector<int>& edge) {
  Vec3 pts[3];
  for (int i = 0; i < 3; ++i) {
    const BinTriple& t = b.vertices[edge[i]];
    pts[i] = Vec3(double(t[2]), double(t[1]), double(t[0]));
  }
  int best = 1;
  double best_dev = std::numeric_limits<double>::max();
  for (int mid = 0; mid < 3; ++mid) {
    const int s = mid == 0 ? 1 : 0;
    const int e = mid == 2 ? 1 : 2;
    try {
      const Arc3 arc = make_arc(pts[s], pts[mid], pts[e]);
      const double dev = (eval_arc_midparam(arc) - pts[mid]).norm();
      if (dev < best_dev) {
        best_dev = dev;
        best = mid;
      }
    } catch (const CollinearPoints&) {
      return 1;  // middle index by convention when geometry degenerates
    }
  }
  return best;
}

}  // namespace

std::string murmur128_hex(const std::string& data, std::uint64_t seed) {
  std::uint64_t out[2];
  murmur128(data.data(), data.size(), seed, out);
  return hex64(out[0]) + hex64(out[1]);
}

std::string wl_hash(const AttributedGraph& g, int iterations) {
  if (iterations < 1) throw std::invalid_argument("wl_hash: iterations >= 1");
  const int n = g.num_nodes();

  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = murmur128_hex(g.node_attrs[i]);

  std::vector<std::vector<std::pair<int, const std::string*>>> adj(n);
  for (const auto& [a, b, attr] : g.edges) {
    adj[a].push_back({b, &attr});
    adj[b].push_back({a, &attr});
  }

  for (int it = 0; it < iterations; ++it) {
    std::vector<std::string> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> nbr;
      nbr.reserve(adj[i].size());
      for (const auto& [j, attr] : adj[i]) nbr.push_back(*attr + labels[j]);
      std::sort(nbr.begin(), nbr.end());
      std::string agg = labels[i];
      for (const std::string& s : nbr) agg += s;
      next[i] = murmur128_hex(agg);
    }
    labels.swap(next);
  }

  std::sort(labels.begin(), labels.end());
  std::string all;
  for (const std::string& l : labels) all += l;
  return murmur128_hex(all);
}

AttributedGraph vertex_adjacency_graph(const IndexedBRep& b) {
  // Arc midpoints are attributes, not nodes; find the node set first.
  std::vector<char> is_mid_only(b.vertices.size(), 0);
  std::vector<char> is_endpoint(b.vertices.size(), 0);
  struct Rec {
    int a, bidx;
    std::string attr;
  };
  std::vector<Rec> recs;
  for (const auto& e : b.edges) {
    if (e.size() == 2) {
      is_endpoint[e[0]] = is_endpoint[e[1]] = 1;
      recs.push_back({e[0], e[1], "line"});
    } else {
      const int mid = resolve_arc_mid(b, e);
      const int s = mid == 0 ? 1 : 0;
      const int t = mid == 2 ? 1 : 2;
      is_endpoint[e[s]] = is_endpoint[e[t]] = 1;
      is_mid_only[e[mid]] = 1;
      recs.push_back({e[s], e[t], "arc:" + triple_str(b.vertices[e[mid]])});
    }
  }

  AttributedGraph g;
  std::vector<int> node_of(b.vertices.size(), -1);
  for (size_t i = 0; i < b.vertices.size(); ++i) {
    if (is_mid_only[i] && !is_endpoint[i]) continue;
    node_of[i] = g.num_nodes();
    g.node_attrs.push_back(triple_str(b.vertices[i]));
  }
  for (const Rec& r : recs) g.add_edge(node_of[r.a], node_of[r.bidx], r.attr);
  return g;
}

AttributedGraph face_adjacency_graph(const IndexedBRep& b) {
  AttributedGraph g;
  for (const auto& f : b.faces) {
    std::vector<std::string> kinds;
    for (int e : f) kinds.push_back(b.edges[e].size() == 2 ? "line" : "arc");
    std::sort(kinds.begin(), kinds.end());
    std::string attr;
    for (size_t i = 0; i < kinds.size(); ++i) attr += (i ? "," : "") + kinds[i];
    g.node_attrs.push_back(attr);
  }
  for (size_t i = 0; i < b.faces.size(); ++i) {
    for (size_t j = i + 1; j < b.faces.size(); ++j) {
      int shared = 0;
      for (int e : b.faces[i])
        if (std::find(b.faces[j].begin(), b.faces[j].end(), e) != b.faces[j].end())
          ++shared;
      if (shared > 0) g.add_edge(int(i), int(j), std::to_string(shared));
    }
  }
  return g;
}

ContentHash content_hash(const IndexedBRep& b, int wl_iterations) {
  ContentHash h;
  h.face_graph_hash = wl_hash(face_adjacency_graph(b), wl_iterations);
  h.vertex_graph_hash = wl_hash(vertex_adjacency_graph(b), wl_iterations);
  return h;
}

Metrics compute_metrics(const std::vector<SampleRecord>& samples,
                        const std::set<std::string>& train_hashes) {
  Metrics m;
  m.total = int(samples.size());
  std::set<std::string> seen;
  for (const SampleRecord& s : samples) {
    if (!s.valid) continue;
    ++m.valid;
    const std::string h = content_hash(s.brep).combined();
    if (!train_hashes.count(h)) ++m.novel_count;
    seen.insert(h);
  }
  m.unique_count = int(seen.size());
  if (m.total == 0) {
    m.undefined = true;
    return m;
  }
  m.valid_pct = 100.0 * m.valid / m.total;
  if (m.valid == 0) {
    m.undefined = true;
    return m;
  }
  m.novel_pct = 100.0 * m.novel_count / m.valid;
  m.unique_pct = 100.0 * m.unique_count / m.valid;
  return m;
}

}  // namespace ibrep
