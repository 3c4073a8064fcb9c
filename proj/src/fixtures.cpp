#include "ibrep/fixtures.hpp"

#include "ibrep/sampler.hpp"

#include <cmath>
#include <map>
#include <random>

namespace ibrep::fixtures {

namespace {

// Collects raw lattice geometry; vertices and edges deduplicate on the fly
// so faces can reference shared entities by id.
class Builder {
 public:
  int vertex(int x, int y, int z) {
    const BinTriple t{z, y, x};
    auto [it, inserted] = vmap_.try_emplace(t, int(raw_.vertices.size()));
    if (inserted) raw_.vertices.push_back(t);
    return it->second;
  }

  int line(int a, int b) { return edge({a, b}); }
  int arc(int a, int mid, int b) { return edge({a, mid, b}); }

  void face(std::vector<int> edges) { raw_.faces.push_back(std::move(edges)); }

  IndexedBRep& raw() { return raw_; }

 private:
  int edge(std::vector<int> e) {
    std::vector<int> key = e;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = emap_.try_emplace(key, int(raw_.edges.size()));
    if (inserted) raw_.edges.push_back(std::move(e));
    return it->second;
  }

  IndexedBRep raw_;
  std::map<BinTriple, int> vmap_;
  std::map<std::vector<int>, int> emap_;
};

struct Rng {
  std::mt19937_64 g;
  int range(int lo, int hi) {  // inclusive
    return lo + int(g() % std::uint64_t(hi - lo + 1));
  }
};

// Signed axis permutation plus translation: the lattice isometries, which
// preserve curve and surface classes exactly.
void orient_random(IndexedBRep& raw, Rng& rng, int levels) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const int* perm = perms[rng.range(0, 5)];
  const bool flip[3] = {rng.range(0, 1) == 1, rng.range(0, 1) == 1,
                        rng.range(0, 1) == 1};
  int lo[3] = {levels, levels, levels}, hi[3] = {0, 0, 0};
  for (BinTriple& t : raw.vertices) {
    const int src[3] = {t[2], t[1], t[0]};  // x, y, z
    int dst[3];
    for (int i = 0; i < 3; ++i) {
      const int c = src[perm[i]];
      dst[i] = flip[i] ? levels - 1 - c : c;
      lo[i] = std::min(lo[i], dst[i]);
      hi[i] = std::max(hi[i], dst[i]);
    }
    t = {dst[2], dst[1], dst[0]};
  }
  int shift[3];
  for (int i = 0; i < 3; ++i)
    shift[i] = rng.range(-lo[i], levels - 1 - hi[i]);
  for (BinTriple& t : raw.vertices) {
    t[0] += shift[2];
    t[1] += shift[1];
    t[2] += shift[0];
  }
}

// ---- box --------------------------------------------------------------

void add_box(Builder& b, int x0, int x1, int y0, int y1, int z0, int z1) {
  int v[2][2][2];
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy)
      for (int iz = 0; iz < 2; ++iz)
        v[ix][iy][iz] = b.vertex(ix ? x1 : x0, iy ? y1 : y0, iz ? z1 : z0);
  int ex[2][2], ey[2][2], ez[2][2];
  for (int iy = 0; iy < 2; ++iy)
    for (int iz = 0; iz < 2; ++iz) ex[iy][iz] = b.line(v[0][iy][iz], v[1][iy][iz]);
  for (int ix = 0; ix < 2; ++ix)
    for (int iz = 0; iz < 2; ++iz) ey[ix][iz] = b.line(v[ix][0][iz], v[ix][1][iz]);
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy) ez[ix][iy] = b.line(v[ix][iy][0], v[ix][iy][1]);

  b.face({ex[0][0], ex[1][0], ey[0][0], ey[1][0]});  // z = z0
  b.face({ex[0][1], ex[1][1], ey[0][1], ey[1][1]});  // z = z1
  b.face({ex[0][0], ex[0][1], ez[0][0], ez[1][0]});  // y = y0
  b.face({ex[1][0], ex[1][1], ez[0][1], ez[1][1]});  // y = y1
  b.face({ey[0][0], ey[0][1], ez[0][0], ez[0][1]});  // x = x0
  b.face({ey[1][0], ey[1][1], ez[1][0], ez[1][1]});  // x = x1
}

IndexedBRep build_box(Rng& rng) {
  Builder b;
  const int sx = rng.range(12, 48), sy = rng.range(12, 48), sz = rng.range(12, 48);
  const int x0 = rng.range(2, 61 - sx), y0 = rng.range(2, 61 - sy),
            z0 = rng.range(2, 61 - sz);
  add_box(b, x0, x0 + sx, y0, y0 + sy, z0, z0 + sz);
  return b.raw();
}

// ---- box with a rectangular pocket -------------------------------------

void add_pocket_box(Builder& b, int x0, int x1, int y0, int y1, int z0, int z1,
                    int px0, int px1, int py0, int py1, int zf) {
  int v[2][2][2];
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy)
      for (int iz = 0; iz < 2; ++iz)
        v[ix][iy][iz] = b.vertex(ix ? x1 : x0, iy ? y1 : y0, iz ? z1 : z0);
  int ex[2][2], ey[2][2], ez[2][2];
  for (int iy = 0; iy < 2; ++iy)
    for (int iz = 0; iz < 2; ++iz) ex[iy][iz] = b.line(v[0][iy][iz], v[1][iy][iz]);
  for (int ix = 0; ix < 2; ++ix)
    for (int iz = 0; iz < 2; ++iz) ey[ix][iz] = b.line(v[ix][0][iz], v[ix][1][iz]);
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy) ez[ix][iy] = b.line(v[ix][iy][0], v[ix][iy][1]);

  int rim[2][2], flo[2][2];
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy) {
      rim[ix][iy] = b.vertex(ix ? px1 : px0, iy ? py1 : py0, z1);
      flo[ix][iy] = b.vertex(ix ? px1 : px0, iy ? py1 : py0, zf);
    }
  const int rx0 = b.line(rim[0][0], rim[1][0]), rx1 = b.line(rim[0][1], rim[1][1]);
  const int ry0 = b.line(rim[0][0], rim[0][1]), ry1 = b.line(rim[1][0], rim[1][1]);
  const int fx0 = b.line(flo[0][0], flo[1][0]), fx1 = b.line(flo[0][1], flo[1][1]);
  const int fy0 = b.line(flo[0][0], flo[0][1]), fy1 = b.line(flo[1][0], flo[1][1]);
  int pz[2][2];
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy) pz[ix][iy] = b.line(flo[ix][iy], rim[ix][iy]);

  b.face({ex[0][0], ex[1][0], ey[0][0], ey[1][0]});  // bottom
  b.face({ex[0][0], ex[0][1], ez[0][0], ez[1][0]});  // y = y0
  b.face({ex[1][0], ex[1][1], ez[0][1], ez[1][1]});  // y = y1
  b.face({ey[0][0], ey[0][1], ez[0][0], ez[0][1]});  // x = x0
  b.face({ey[1][0], ey[1][1], ez[1][0], ez[1][1]});  // x = x1
  b.face({ex[0][1], ex[1][1], ey[0][1], ey[1][1], rx0, rx1, ry0, ry1});  // ring
  b.face({rx0, fx0, pz[0][0], pz[1][0]});  // pocket wall y = py0
  b.face({rx1, fx1, pz[0][1], pz[1][1]});  // pocket wall y = py1
  b.face({ry0, fy0, pz[0][0], pz[0][1]});  // pocket wall x = px0
  b.face({ry1, fy1, pz[1][0], pz[1][1]});  // pocket wall x = px1
  b.face({fx0, fx1, fy0, fy1});            // pocket floor
}

IndexedBRep build_pocket(Rng& rng) {
  Builder b;
  const int sx = rng.range(20, 48), sy = rng.range(20, 48), sz = rng.range(12, 40);
  const int x0 = rng.range(2, 61 - sx), y0 = rng.range(2, 61 - sy),
            z0 = rng.range(2, 61 - sz);
  const int ix0 = rng.range(3, sx - 7), iy0 = rng.range(3, sy - 7);
  const int ix1 = rng.range(ix0 + 4, sx - 3), iy1 = rng.range(iy0 + 4, sy - 3);
  const int depth = rng.range(3, sz - 3);
  add_pocket_box(b, x0, x0 + sx, y0, y0 + sy, z0, z0 + sz, x0 + ix0, x0 + ix1,
                 y0 + iy0, y0 + iy1, z0 + sz - depth);
  return b.raw();
}

// ---- prism with a quarter-cylinder fillet -------------------------------

void add_fillet_prism(Builder& b, int ox, int oy, int oz, int X, int Y, int Z,
                      int r) {
  const int mo = int(std::lround(r / std::sqrt(2.0)));
  // Profile in the xz plane, swept along y.
  const int px[5] = {ox, ox + X, ox + X, ox + X - r, ox};
  const int pz[5] = {oz, oz, oz + Z - r, oz + Z, oz + Z};
  const int mx = ox + X - r + mo, mz = oz + Z - r + mo;

  int corner[2][5], mid[2];
  for (int s = 0; s < 2; ++s) {
    const int y = s ? oy + Y : oy;
    for (int i = 0; i < 5; ++i) corner[s][i] = b.vertex(px[i], y, pz[i]);
    mid[s] = b.vertex(mx, y, mz);
  }
  int prof[2][5];
  for (int s = 0; s < 2; ++s) {
    prof[s][0] = b.line(corner[s][0], corner[s][1]);
    prof[s][1] = b.line(corner[s][1], corner[s][2]);
    prof[s][2] = b.arc(corner[s][2], mid[s], corner[s][3]);
    prof[s][3] = b.line(corner[s][3], corner[s][4]);
    prof[s][4] = b.line(corner[s][4], corner[s][0]);
  }
  int axial[5];
  for (int i = 0; i < 5; ++i) axial[i] = b.line(corner[0][i], corner[1][i]);

  b.face({prof[0][0], prof[1][0], axial[0], axial[1]});  // bottom z
  b.face({prof[0][1], prof[1][1], axial[1], axial[2]});  // front x = ox + X
  b.face({prof[0][2], prof[1][2], axial[2], axial[3]});  // fillet cylinder
  b.face({prof[0][3], prof[1][3], axial[3], axial[4]});  // top z
  b.face({prof[0][4], prof[1][4], axial[4], axial[0]});  // back x = ox
  b.face({prof[0][0], prof[0][1], prof[0][2], prof[0][3], prof[0][4]});  // y = oy
  b.face({prof[1][0], prof[1][1], prof[1][2], prof[1][3], prof[1][4]});  // y = oy+Y
}

IndexedBRep build_fillet(Rng& rng) {
  Builder b;
  const int r = rng.range(8, 20);
  const int X = rng.range(r + 6, 52), Z = rng.range(r + 6, 52), Y = rng.range(10, 52);
  const int ox = rng.range(2, 61 - X), oy = rng.range(2, 61 - Y),
            oz = rng.range(2, 61 - Z);
  add_fillet_prism(b, ox, oy, oz, X, Y, Z, r);
  return b.raw();
}

// ---- half cone frustum ---------------------------------------------------

void add_half_cone(Builder& b, int cx, int cy, int z0, int z1, int r1, int r2) {
  const int a1 = b.vertex(cx - r1, cy, z0), b1 = b.vertex(cx + r1, cy, z0);
  const int m1 = b.vertex(cx, cy + r1, z0);
  const int a2 = b.vertex(cx - r2, cy, z1), b2 = b.vertex(cx + r2, cy, z1);
  const int m2 = b.vertex(cx, cy + r2, z1);

  const int arc1 = b.arc(a1, m1, b1);
  const int arc2 = b.arc(a2, m2, b2);
  const int dia1 = b.line(a1, b1);
  const int dia2 = b.line(a2, b2);
  const int slant_a = b.line(a1, a2);
  const int slant_b = b.line(b1, b2);

  b.face({arc1, dia1});                      // bottom half disc
  b.face({arc2, dia2});                      // top half disc
  b.face({dia1, dia2, slant_a, slant_b});    // flat back
  b.face({arc1, arc2, slant_a, slant_b});    // conical lateral face
}

IndexedBRep build_cone(Rng& rng) {
  Builder b;
  const int r1 = rng.range(10, 22);
  const int r2 = rng.range(4, r1 - 5);
  const int h = rng.range(10, 36);
  const int cx = rng.range(r1 + 2, 61 - r1);
  const int cy = rng.range(2, 61 - r1);
  const int z0 = rng.range(2, 61 - h);
  add_half_cone(b, cx, cy, z0, z0 + h, r1, r2);
  return b.raw();
}

// ---- eighth-of-a-ball corner fillet -------------------------------------

void add_sphere_octant(Builder& b, int cx, int cy, int cz, int r) {
  // (a, b) with a^2 + b^2 = r^2 keeps every arc point exactly on the
  // sphere; the stored midpoint sits near (not at) the half parameter,
  // within the midpoint test's tolerance.
  const int pa = r == 5 ? 3 : 6, pb = r == 5 ? 4 : 8;

  const int c = b.vertex(cx, cy, cz);
  const int vx = b.vertex(cx + r, cy, cz);
  const int vy = b.vertex(cx, cy + r, cz);
  const int vz = b.vertex(cx, cy, cz + r);
  const int mxy = b.vertex(cx + pa, cy + pb, cz);
  const int myz = b.vertex(cx, cy + pb, cz + pa);
  const int mxz = b.vertex(cx + pa, cy, cz + pb);

  const int arc_xy = b.arc(vx, mxy, vy);
  const int arc_yz = b.arc(vy, myz, vz);
  const int arc_xz = b.arc(vx, mxz, vz);
  const int line_x = b.line(c, vx);
  const int line_y = b.line(c, vy);
  const int line_z = b.line(c, vz);

  b.face({arc_xy, line_x, line_y});  // quarter disc z = cz
  b.face({arc_xz, line_x, line_z});  // quarter disc y = cy
  b.face({arc_yz, line_y, line_z});  // quarter disc x = cx
  b.face({arc_xy, arc_yz, arc_xz});  // spherical octant
}

IndexedBRep build_sphere(Rng& rng) {
  Builder b;
  const int r = rng.range(0, 1) ? 10 : 5;
  const int cx = rng.range(2, 61 - r), cy = rng.range(2, 61 - r),
            cz = rng.range(2, 61 - r);
  add_sphere_octant(b, cx, cy, cz, r);
  return b.raw();
}

// ---- torus ring ----------------------------------------------------------

void add_torus_ring(Builder& b, int cx, int cy, int cz, int R, int r) {
  const int out_a = b.vertex(cx + R + r, cy, cz);
  const int out_b = b.vertex(cx - R - r, cy, cz);
  const int out_f = b.vertex(cx, cy + R + r, cz);
  const int out_k = b.vertex(cx, cy - R - r, cz);
  const int in_a = b.vertex(cx + R - r, cy, cz);
  const int in_b = b.vertex(cx - R + r, cy, cz);
  const int in_f = b.vertex(cx, cy + R - r, cz);
  const int in_k = b.vertex(cx, cy - R + r, cz);
  const int top_a = b.vertex(cx + R, cy, cz + r);
  const int bot_a = b.vertex(cx + R, cy, cz - r);
  const int top_b = b.vertex(cx - R, cy, cz + r);
  const int bot_b = b.vertex(cx - R, cy, cz - r);

  const int outer_front = b.arc(out_a, out_f, out_b);
  const int outer_back = b.arc(out_a, out_k, out_b);
  const int inner_front = b.arc(in_a, in_f, in_b);
  const int inner_back = b.arc(in_a, in_k, in_b);
  const int minor_top_a = b.arc(in_a, top_a, out_a);
  const int minor_bot_a = b.arc(in_a, bot_a, out_a);
  const int minor_top_b = b.arc(in_b, top_b, out_b);
  const int minor_bot_b = b.arc(in_b, bot_b, out_b);

  b.face({outer_front, inner_front, minor_top_a, minor_top_b});
  b.face({outer_back, inner_back, minor_top_a, minor_top_b});
  b.face({outer_front, inner_front, minor_bot_a, minor_bot_b});
  b.face({outer_back, inner_back, minor_bot_a, minor_bot_b});
}

IndexedBRep build_torus(Rng& rng) {
  Builder b;
  const int r = rng.range(6, 9);
  const int R = rng.range(2 * r + 2, 31 - r - 2);
  const int cx = rng.range(R + r + 1, 62 - R - r);
  const int cy = rng.range(R + r + 1, 62 - R - r);
  const int cz = rng.range(r + 2, 61 - r);
  add_torus_ring(b, cx, cy, cz, R, r);
  return b.raw();
}

IndexedBRep build_family(Family family, Rng& rng) {
  switch (family) {
    case Family::Box: return build_box(rng);
    case Family::Pocket: return build_pocket(rng);
    case Family::Fillet: return build_fillet(rng);
    case Family::Cone: return build_cone(rng);
    case Family::Sphere: return build_sphere(rng);
    case Family::Torus: return build_torus(rng);
  }
  throw std::invalid_argument("unknown family");
}

IbrepFile finish(IndexedBRep raw, int bits) {
  IbrepFile f;
  f.grid.bits = bits;
  f.grid.bbox_min = Vec3::Zero();
  f.grid.bbox_max = Vec3::Ones();
  f.brep = canonicalize(raw, DuplicatePolicy::Reject);
  return f;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Box: return "box";
    case Family::Pocket: return "pocket";
    case Family::Fillet: return "fillet";
    case Family::Cone: return "cone";
    case Family::Sphere: return "sphere";
    case Family::Torus: return "torus";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (Family f : kAllFamilies)
    if (name == family_name(f)) return f;
  throw std::invalid_argument("unknown fixture family \"" + name + "\"");
}

IbrepFile make(Family family, std::uint64_t seed, int index, int bits) {
  if (bits != 6)
    throw std::invalid_argument("fixtures are authored on the 6-bit lattice");
  Rng rng{std::mt19937_64(
      splitmix64(seed + 0x100000001ull * std::uint64_t(int(family) + 1) +
                 0x9E3779B97F4A7C15ull * std::uint64_t(index)))};
  IndexedBRep raw = build_family(family, rng);
  orient_random(raw, rng, 1 << bits);
  return finish(std::move(raw), bits);
}

IbrepFile canonical(Family family, int bits) {
  if (bits != 6)
    throw std::invalid_argument("fixtures are authored on the 6-bit lattice");
  Builder b;
  switch (family) {
    case Family::Box:
      add_box(b, 8, 48, 8, 40, 8, 32);
      break;
    case Family::Pocket:
      add_pocket_box(b, 8, 52, 8, 44, 8, 30, 16, 44, 16, 36, 20);
      break;
    case Family::Fillet:
      add_fillet_prism(b, 8, 8, 8, 40, 24, 36, 16);
      break;
    case Family::Cone:
      add_half_cone(b, 32, 8, 8, 40, 20, 8);
      break;
    case Family::Sphere:
      add_sphere_octant(b, 20, 20, 20, 10);
      break;
    case Family::Torus:
      add_torus_ring(b, 32, 32, 16, 18, 8);
      break;
  }
  return finish(std::move(b.raw()), bits);
}

std::vector<IbrepFile> corpus(std::uint64_t seed, int count_per_family, int bits) {
  std::vector<IbrepFile> out;
  for (Family f : kAllFamilies)
    for (int i = 0; i < count_per_family; ++i)
      out.push_back(make(f, seed, i, bits));
  return out;
}

}  // namespace ibrep::fixtures
