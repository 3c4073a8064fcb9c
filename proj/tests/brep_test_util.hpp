#pragma once

#include "ibrep/indexed_brep.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace testutil {

using ibrep::BinTriple;
using ibrep::IndexedBRep;

// Hand-enumerated unit cube fixture: 8 vertices, 12 line edges, 6 faces,
// already in canonical order. `lo`/`hi` set the bin coordinates.
inline IndexedBRep hand_cube(int lo = 0, int hi = 1) {
  IndexedBRep b;
  for (int z : {lo, hi})
    for (int y : {lo, hi})
      for (int x : {lo, hi}) b.vertices.push_back({z, y, x});
  b.edges = {{0, 1}, {0, 2}, {0, 4}, {1, 3}, {1, 5}, {2, 3},
             {2, 6}, {3, 7}, {4, 5}, {4, 6}, {5, 7}, {6, 7}};
  b.faces = {{0, 1, 3, 5},  {0, 2, 4, 8},  {1, 2, 6, 9},
             {3, 4, 7, 10}, {5, 6, 7, 11}, {8, 9, 10, 11}};
  return b;
}

inline std::mt19937_64 test_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Random relabeling and reordering that canonicalize must normalize away:
// permutes vertex ids (remapping edges), edge ids (remapping faces), the
// order within every edge and face, and the face list order.
inline IndexedBRep shuffle_brep(const IndexedBRep& b, std::mt19937_64& rng) {
  IndexedBRep out;

  std::vector<int> vperm(b.vertices.size());
  std::iota(vperm.begin(), vperm.end(), 0);
  std::shuffle(vperm.begin(), vperm.end(), rng);
  // vperm[i] = new position of old vertex i
  out.vertices.resize(b.vertices.size());
  for (size_t i = 0; i < b.vertices.size(); ++i)
    out.vertices[vperm[i]] = b.vertices[i];

  std::vector<int> eperm(b.edges.size());
  std::iota(eperm.begin(), eperm.end(), 0);
  std::shuffle(eperm.begin(), eperm.end(), rng);
  out.edges.resize(b.edges.size());
  for (size_t i = 0; i < b.edges.size(); ++i) {
    std::vector<int> e;
    for (int v : b.edges[i]) e.push_back(vperm[v]);
    std::shuffle(e.begin(), e.end(), rng);
    out.edges[eperm[i]] = std::move(e);
  }

  for (const auto& f : b.faces) {
    std::vector<int> nf;
    for (int e : f) nf.push_back(eperm[e]);
    std::shuffle(nf.begin(), nf.end(), rng);
    out.faces.push_back(std::move(nf));
  }
  std::shuffle(out.faces.begin(), out.faces.end(), rng);
  return out;
}

}  // namespace testutil
