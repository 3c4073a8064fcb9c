#include "ibrep/indexed_brep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace ibrep {

void QuantGrid::check() const {
  if (bits < 2 || bits > 16) throw std::invalid_argument("bits out of [2,16]");
  if (!((bbox_max - bbox_min).array() > 0).all())
    throw std::invalid_argument("empty quantization bbox");
}

QuantizeResult quantize(const std::vector<Vec3>& points, int bits) {
  if (points.empty()) throw std::invalid_argument("quantize: empty input");
  for (const Vec3& p : points)
    if (!p.allFinite()) throw std::invalid_argument("quantize: non-finite point");

  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // Uniform scale: a cube of the longest extent, centered per axis.
  double extent = (hi - lo).maxCoeff();
  if (extent <= 0) extent = 1.0;
  const Vec3 center = 0.5 * (lo + hi);

  QuantizeResult out;
  out.grid.bits = bits;
  out.grid.bbox_min = center - Vec3::Constant(0.5 * extent);
  out.grid.bbox_max = center + Vec3::Constant(0.5 * extent);
  out.grid.check();

  const int levels = out.grid.levels();
  out.bins.reserve(points.size());
  for (const Vec3& p : points) {
    const Vec3 c = (p - out.grid.bbox_min) / extent;
    BinTriple t;
    for (int axis = 0; axis < 3; ++axis) {
      // stored order is (z, y, x)
      const double v = c[2 - axis];
      t[axis] = std::clamp(int(std::floor(v * levels)), 0, levels - 1);
    }
    out.bins.push_back(t);
  }

  // Distinct points that collide in one bin mark the model as merged.
  std::map<BinTriple, Vec3> seen;
  for (size_t i = 0; i < points.size(); ++i) {
    auto [it, inserted] = seen.emplace(out.bins[i], points[i]);
    if (!inserted && (it->second - points[i]).norm() > 1e-12)
      out.merged_vertices = true;
  }
  return out;
}

BinTriple quantize_point(const QuantGrid& grid, const Vec3& p) {
  grid.check();
  const int levels = grid.levels();
  const Vec3 size = grid.bbox_max - grid.bbox_min;
  BinTriple t;
  for (int axis = 0; axis < 3; ++axis) {
    const double c = (p[2 - axis] - grid.bbox_min[2 - axis]) / size[2 - axis];
    t[axis] = std::clamp(int(std::floor(c * levels)), 0, levels - 1);
  }
  return t;
}

Vec3 dequantize(const QuantGrid& grid, const BinTriple& t) {
  grid.check();
  const int levels = grid.levels();
  for (int axis = 0; axis < 3; ++axis)
    if (t[axis] < 0 || t[axis] >= levels)
      throw std::out_of_range("dequantize: bin component out of range");
  const Vec3 size = grid.bbox_max - grid.bbox_min;
  Vec3 p;
  for (int axis = 0; axis < 3; ++axis) {
    const double c = (double(t[2 - axis]) + 0.5) / levels;  // t is (z,y,x)
    p[axis] = grid.bbox_min[axis] + c * size[axis];
  }
  return p;
}

namespace {

void validate_raw(const IndexedBRep& raw) {
  const int nv = int(raw.vertices.size());
  const int ne = int(raw.edges.size());
  for (size_t i = 0; i < raw.edges.size(); ++i) {
    const auto& e = raw.edges[i];
    if (e.size() != 2 && e.size() != 3)
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  ": cardinality must be 2 or 3");
    for (int idx : e)
      if (idx < 0 || idx >= nv)
        throw std::invalid_argument("edge " + std::to_string(i) +
                                    ": vertex index out of range");
  }
  for (size_t i = 0; i < raw.faces.size(); ++i) {
    for (int idx : raw.faces[i])
      if (idx < 0 || idx >= ne)
        throw std::invalid_argument("face " + std::to_string(i) +
                                    ": edge index out of range");
  }
}

}  // namespace

IndexedBRep canonicalize(const IndexedBRep& raw, DuplicatePolicy policy) {
  validate_raw(raw);

  // Vertices: sort by (z,y,x), merge duplicates, remap.
  std::vector<int> order(raw.vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return raw.vertices[a] < raw.vertices[b]; });

  IndexedBRep out;
  std::vector<int> vmap(raw.vertices.size(), -1);
  for (int idx : order) {
    if (!out.vertices.empty() && out.vertices.back() == raw.vertices[idx]) {
      if (policy == DuplicatePolicy::Reject)
        throw MergedVertexCollision("vertices share bin (" +
                                    std::to_string(raw.vertices[idx][0]) + "," +
                                    std::to_string(raw.vertices[idx][1]) + "," +
                                    std::to_string(raw.vertices[idx][2]) + ")");
      vmap[idx] = int(out.vertices.size()) - 1;
    } else {
      vmap[idx] = int(out.vertices.size());
      out.vertices.push_back(raw.vertices[idx]);
    }
  }

  // Edges: remap members, sort within, dedup within, sort list, merge dups.
  std::vector<std::vector<int>> edges;
  edges.reserve(raw.edges.size());
  for (size_t i = 0; i < raw.edges.size(); ++i) {
    std::vector<int> e;
    for (int idx : raw.edges[i]) e.push_back(vmap[idx]);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.size() < 2)
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  ": collapsed after vertex merging");
    edges.push_back(std::move(e));
  }
  std::vector<int> eorder(edges.size());
  std::iota(eorder.begin(), eorder.end(), 0);
  std::sort(eorder.begin(), eorder.end(),
            [&](int a, int b) { return edges[a] < edges[b]; });
  std::vector<int> emap(edges.size(), -1);
  for (int idx : eorder) {
    if (!out.edges.empty() && out.edges.back() == edges[idx]) {
      emap[idx] = int(out.edges.size()) - 1;
    } else {
      emap[idx] = int(out.edges.size());
      out.edges.push_back(edges[idx]);
    }
  }

  // Faces: remap, sort within, dedup within, sort list, drop duplicate faces.
  std::vector<std::vector<int>> faces;
  for (size_t i = 0; i < raw.faces.size(); ++i) {
    std::vector<int> f;
    for (int idx : raw.faces[i]) f.push_back(emap[idx]);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    if (f.size() < 2)
      throw std::invalid_argument("face " + std::to_string(i) +
                                  ": fewer than 2 distinct edges");
    faces.push_back(std::move(f));
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  out.faces = std::move(faces);

  // An edge may bound at most two faces.
  std::vector<int> use(out.edges.size(), 0);
  for (const auto& f : out.faces)
    for (int e : f)
      if (++use[e] > 2)
        throw std::invalid_argument("edge " + std::to_string(e) +
                                    " referenced by more than 2 faces");
  return out;
}

std::vector<Violation> structural_check(const IndexedBRep& b) {
  std::vector<Violation> out;
  const int nv = int(b.vertices.size());
  const int ne = int(b.edges.size());

  for (int i = 0; i + 1 < nv; ++i) {
    if (!(b.vertices[i] < b.vertices[i + 1]))
      out.push_back({"vertex " + std::to_string(i + 1),
                     b.vertices[i] == b.vertices[i + 1]
                         ? "duplicate vertex"
                         : "vertices not sorted by (z,y,x)"});
  }

  for (int i = 0; i < ne; ++i) {
    const auto& e = b.edges[i];
    const std::string ent = "edge " + std::to_string(i);
    if (e.size() != 2 && e.size() != 3)
      out.push_back({ent, "cardinality not 2 or 3"});
    bool in_range = true;
    for (int idx : e)
      if (idx < 0 || idx >= nv) in_range = false;
    if (!in_range) out.push_back({ent, "vertex index out of range"});
    for (size_t k = 0; k + 1 < e.size(); ++k)
      if (e[k] >= e[k + 1]) {
        out.push_back({ent, "vertex indices not strictly ascending"});
        break;
      }
    if (i + 1 < ne) {
      if (b.edges[i] == b.edges[i + 1])
        out.push_back({ent, "duplicate hyperedge"});
      else if (b.edges[i + 1] < b.edges[i])
        out.push_back({ent, "edges not sorted"});
    }
  }

  std::vector<int> use(std::max(ne, 0), 0);
  for (size_t i = 0; i < b.faces.size(); ++i) {
    const auto& f = b.faces[i];
    const std::string ent = "face " + std::to_string(i);
    if (f.size() < 2) out.push_back({ent, "fewer than 2 edges"});
    bool in_range = true;
    for (int idx : f)
      if (idx < 0 || idx >= ne) in_range = false;
    if (!in_range) {
      out.push_back({ent, "edge index out of range"});
      continue;
    }
    for (size_t k = 0; k + 1 < f.size(); ++k) {
      if (f[k] == f[k + 1]) {
        out.push_back({ent, "duplicate edge in face"});
        break;
      }
      if (f[k] > f[k + 1]) {
        out.push_back({ent, "edge indices not ascending"});
        break;
      }
    }
    for (int idx : f) ++use[idx];
    if (i + 1 < b.faces.size()) {
      if (b.faces[i] == b.faces[i + 1])
        out.push_back({ent, "duplicate face"});
      else if (b.faces[i + 1] < b.faces[i])
        out.push_back({ent, "faces not sorted"});
    }
  }
  for (int e = 0; e < ne; ++e)
    if (use[e] > 2)
      out.push_back({"edge " + std::to_string(e), "edge shared by >2 faces"});
  return out;
}

int total_token_count(const IndexedBRep& b) {
  const int v = 3 * int(b.vertices.size()) + 1;
  int e = 1, f = 1;
  for (const auto& edge : b.edges) e += int(edge.size());
  if (!b.edges.empty()) e += int(b.edges.size()) - 1;
  for (const auto& face : b.faces) f += int(face.size());
  if (!b.faces.empty()) f += int(b.faces.size()) - 1;
  return v + e + f;
}

FilterDecision corpus_filter(const IndexedBRep& b, int max_tokens,
                             bool merged_vertices) {
  const int nf = int(b.faces.size());
  if (nf < 8) return {false, "trivial (<8 faces)"};
  if (nf > 130) return {false, ">130 faces"};
  if (merged_vertices) return {false, "merged vertices after quantization"};
  const int tokens = total_token_count(b);
  if (tokens > max_tokens)
    return {false, ">" + std::to_string(max_tokens) + " tokens (" +
                       std::to_string(tokens) + ")"};
  return {true, ""};
}

}  // namespace ibrep
