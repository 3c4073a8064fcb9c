#pragma once

#include "ibrep/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ibrep {

/// Vertex bin triple stored in (z, y, x) order to match the flattening and
/// masking conventions. Interchange files use (x, y, z); the codec converts.
using BinTriple = std::array<int, 3>;

/// Uniform quantization grid. `bbox` is the cube in model coordinates that
/// maps onto [0,1]^3 (uniform scale, shorter axes centered).
struct QuantGrid {
  int bits = 6;
  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Ones();

  int levels() const { return 1 << bits; }
  void check() const;
};

/// The indexed boundary representation: quantized vertices, hyperedges of
/// 2 (line) or 3 (arc) ascending vertex indices, and faces as ascending
/// edge-index lists. Canonical instances keep every list sorted.
struct IndexedBRep {
  std::vector<BinTriple> vertices;        // sorted lexicographically (z,y,x)
  std::vector<std::vector<int>> edges;    // each ascending, list sorted
  std::vector<std::vector<int>> faces;    // each ascending, list sorted

  bool operator==(const IndexedBRep&) const = default;
};

struct MergedVertexCollision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuantizeResult {
  QuantGrid grid;
  std::vector<BinTriple> bins;
  bool merged_vertices = false;  // distinct input points landed in one bin
};

/// Normalizes the points into the unit cube and maps each coordinate to
/// bin = min(floor(c * levels), levels - 1).
QuantizeResult quantize(const std::vector<Vec3>& points, int bits);

/// Bin center mapped back through the grid's bbox.
Vec3 dequantize(const QuantGrid& grid, const BinTriple& t);

/// Quantizes one point through an existing grid. Round trips are exact:
/// quantize_point(g, dequantize(g, t)) == t.
BinTriple quantize_point(const QuantGrid& grid, const Vec3& p);

enum class DuplicatePolicy { Merge, Reject };

/// Sorts, deduplicates, and remaps a raw (V, E, F) triple into canonical
/// form. Throws std::invalid_argument on malformed input (bad cardinality,
/// out-of-range index, edge used by more than two faces) and
/// MergedVertexCollision under DuplicatePolicy::Reject when two input
/// vertices share a bin.
IndexedBRep canonicalize(const IndexedBRep& raw,
                         DuplicatePolicy policy = DuplicatePolicy::Merge);

struct Violation {
  std::string entity;  // e.g. "vertex 3", "edge 0", "face 2"
  std::string rule;
};

/// Checks every structural invariant; an empty result means canonical.
std::vector<Violation> structural_check(const IndexedBRep& b);

struct FilterDecision {
  bool keep = true;
  std::string reason;  // set when dropped
};

/// The corpus admission rule: drop models with fewer than 8 faces, more
/// than 130 faces, a total token count above max_tokens, or merged
/// vertices detected during quantization.
FilterDecision corpus_filter(const IndexedBRep& b, int max_tokens = 200,
                             bool merged_vertices = false);

/// Total flattened length of all three token sequences, separators and
/// terminators included.
int total_token_count(const IndexedBRep& b);

}  // namespace ibrep
