#include "ibrep/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace ibrep {

namespace {
using Vec2 = Eigen::Vector2d;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

Vec3 CurveGeom::start() const {
  return is_arc() ? arc().start : line().a;
}
Vec3 CurveGeom::end() const {
  return is_arc() ? arc().end : line().b;
}

Vec3 CurveGeom::start_tangent() const {
  if (!is_arc()) return (line().b - line().a).normalized();
  const Arc3& a = arc();
  return a.normal.cross(a.start - a.center).normalized();
}

Vec3 CurveGeom::end_tangent() const {
  if (!is_arc()) return (line().b - line().a).normalized();
  const Arc3& a = arc();
  return a.normal.cross(a.end - a.center).normalized();
}

std::vector<Vec3> CurveGeom::sample(int segments) const {
  if (!is_arc()) return {line().a, line().b};
  const Arc3& a = arc();
  std::vector<Vec3> pts;
  pts.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i)
    pts.push_back(a.point_at(double(i) / segments));
  return pts;
}

int arc_segments(const Arc3& arc, const Tolerances& tol) {
  const int by_chord = int(std::floor(arc.radius * arc.sweep / (2.0 * tol.wire_eps)));
  return std::clamp(by_chord, 8, tol.arc_samples);
}

const char* surface_type_name(const SurfaceGeom& s) {
  switch (s.index()) {
    case 0: return "plane";
    case 1: return "cylinder";
    case 2: return "cone";
    case 3: return "sphere";
    case 4: return "torus";
  }
  return "?";
}

double surface_distance(const SurfaceGeom& s, const Vec3& p) {
  if (const Plane* pl = std::get_if<Plane>(&s))
    return std::abs(pl->normal.dot(p) - pl->offset);
  if (const Cylinder* cy = std::get_if<Cylinder>(&s)) {
    const Vec3 q = p - cy->point;
    const double radial = (q - q.dot(cy->dir) * cy->dir).norm();
    return std::abs(radial - cy->radius);
  }
  if (const Cone* co = std::get_if<Cone>(&s)) {
    const Vec3 q = p - co->apex;
    const double t = q.dot(co->dir);
    const double radial = (q - t * co->dir).norm();
    return std::abs(radial - t * std::tan(co->half_angle)) * std::cos(co->half_angle);
  }
  if (const Sphere* sp = std::get_if<Sphere>(&s))
    return std::abs((p - sp->center).norm() - sp->radius);
  const Torus& to = std::get<Torus>(s);
  const Vec3 q = p - to.center;
  const double z = q.dot(to.dir);
  const double rho = (q - z * to.dir).norm();
  return std::abs(std::hypot(rho - to.major_radius, z) - to.minor_radius);
}

// ---------------------------------------------------------------------------
// Curves

ArcMidPick resolve_arc_midpoint(const std::array<Vec3, 3>& pts, double mid_eps) {
  struct Candidate {
    int mid;
    Arc3 arc;
    double deviation;
  };
  std::vector<Candidate> cands;
  for (int mid = 0; mid < 3; ++mid) {
    const int s = mid == 0 ? 1 : 0;
    const int e = mid == 2 ? 1 : 2;
    Arc3 arc;
    try {
      arc = make_arc(pts[s], pts[mid], pts[e]);
    } catch (const CollinearPoints&) {
      throw CollinearArc("three collinear points do not define an arc");
    }
    cands.push_back({mid, arc, (eval_arc_midparam(arc) - pts[mid]).norm()});
  }

  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.deviation != b.deviation) return a.deviation < b.deviation;
    return a.mid < b.mid;
  });
  if (cands[0].deviation > mid_eps)
    throw KernelError("no point passes the arc midpoint test");

  ArcMidPick pick{cands[0].mid, cands[0].arc, cands[0].deviation, false};
  if (cands[1].deviation <= mid_eps) {
    pick.ambiguous = true;
    for (size_t i = 1; i < cands.size() && cands[i].deviation <= mid_eps; ++i)
      if (cands[i].arc.sweep < pick.arc.sweep) {
        pick.mid_index = cands[i].mid;
        pick.arc = cands[i].arc;
        pick.deviation = cands[i].deviation;
      }
  }
  return pick;
}

namespace {

CurveGeom build_curve(const std::vector<int>& edge, int source_idx,
                      const IndexedBRep& b, const QuantGrid& grid,
                      const Tolerances& tol, std::vector<std::string>* notes) {
  CurveGeom c;
  c.source_edge = source_idx;
  std::array<Vec3, 3> pts;
  for (size_t i = 0; i < edge.size(); ++i)
    pts[i] = dequantize(grid, b.vertices[edge[i]]);

  if (edge.size() == 2) {
    c.geom = LineSeg{pts[0], pts[1]};
    c.start_bin = b.vertices[edge[0]];
    c.end_bin = b.vertices[edge[1]];
    return c;
  }

  ArcMidPick pick;
  try {
    pick = resolve_arc_midpoint(pts, tol.mid_eps);
  } catch (const CollinearArc& e) {
    throw CollinearArc("edge " + std::to_string(source_idx) + ": " + e.what());
  } catch (const KernelError& e) {
    throw KernelError("edge " + std::to_string(source_idx) + ": " + e.what());
  }
  if (pick.ambiguous && notes)
    notes->push_back("edge " + std::to_string(source_idx) +
                     ": ambiguous arc midpoint, taking the smallest sweep");

  const int s = pick.mid_index == 0 ? 1 : 0;
  const int e = pick.mid_index == 2 ? 1 : 2;
  c.geom = pick.arc;
  c.start_bin = b.vertices[edge[s]];
  c.end_bin = b.vertices[edge[e]];
  return c;
}

}  // namespace

std::vector<CurveGeom> build_curves(const IndexedBRep& b, const QuantGrid& grid,
                                    const Tolerances& tol,
                                    std::vector<std::string>* notes) {
  tol.check();
  std::vector<CurveGeom> out;
  out.reserve(b.edges.size());
  for (size_t i = 0; i < b.edges.size(); ++i)
    out.push_back(build_curve(b.edges[i], int(i), b, grid, tol, notes));
  return out;
}

// ---------------------------------------------------------------------------
// Wires

std::vector<Wire> assemble_wires(const std::vector<CurveGeom>& curves,
                                 const Tolerances& tol) {
  if (curves.size() < 2) throw OpenWire("a face needs at least two edges");

  std::map<BinTriple, std::vector<std::pair<int, bool>>> incidence;
  for (size_t i = 0; i < curves.size(); ++i) {
    incidence[curves[i].start_bin].push_back({int(i), true});
    incidence[curves[i].end_bin].push_back({int(i), false});
  }
  for (const auto& [node, inc] : incidence)
    if (inc.size() % 2 != 0)
      throw OpenWire("odd edge incidence at a vertex, cycle cover impossible");

  std::vector<bool> used(curves.size(), false);
  std::vector<Wire> wires;
  for (size_t s = 0; s < curves.size(); ++s) {
    if (used[s]) continue;
    Wire w;
    used[s] = true;
    w.edges.push_back({int(s), false});
    const BinTriple start_node = curves[s].start_bin;
    BinTriple cur_node = curves[s].end_bin;
    Vec3 cur_dir = curves[s].end_tangent();

    while (!(cur_node == start_node)) {
      // Prefer the straightest continuation at junctions of degree > 2.
      int best = -1;
      bool best_at_start = false;
      double best_turn = 0;
      for (const auto& [ci, at_start] : incidence[cur_node]) {
        if (used[ci]) continue;
        const Vec3 out_dir = at_start ? curves[ci].start_tangent()
                                      : Vec3(-curves[ci].end_tangent());
        const double turn = std::acos(std::clamp(cur_dir.dot(out_dir), -1.0, 1.0));
        if (best < 0 || turn < best_turn - 1e-12 ||
            (std::abs(turn - best_turn) <= 1e-12 && ci < best)) {
          best = ci;
          best_at_start = at_start;
          best_turn = turn;
        }
      }
      if (best < 0) throw OpenWire("wire does not close");
      used[best] = true;
      const bool rev = !best_at_start;
      w.edges.push_back({best, rev});
      cur_node = rev ? curves[best].start_bin : curves[best].end_bin;
      cur_dir = rev ? Vec3(-curves[best].start_tangent()) : curves[best].end_tangent();
    }
    if (w.edges.size() < 2) throw OpenWire("trivial cycle of fewer than 2 edges");
    wires.push_back(std::move(w));
  }

  // Outer wire: largest sampled bounding-box diagonal.
  std::vector<double> diag(wires.size(), 0);
  for (size_t wi = 0; wi < wires.size(); ++wi) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = -lo;
    for (const WireEdge& we : wires[wi].edges)
      for (const Vec3& p : curves[we.curve].sample(16)) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
    diag[wi] = (hi - lo).norm();
  }
  size_t outer = 0;
  for (size_t wi = 1; wi < wires.size(); ++wi)
    if (diag[wi] > diag[outer]) outer = wi;
  for (size_t wi = 0; wi < wires.size(); ++wi)
    if (wi != outer && std::abs(diag[wi] - diag[outer]) <= tol.geom_eps)
      throw NestedAmbiguity("two wires with equal bounding-box extents");
  wires[outer].outer = true;
  if (outer != 0) std::swap(wires[0], wires[outer]);
  return wires;
}

// ---------------------------------------------------------------------------
// Surfaces

namespace {

std::vector<Vec3> defining_points(const std::vector<CurveGeom>& curves) {
  std::vector<Vec3> pts;
  for (const CurveGeom& c : curves) {
    if (c.is_arc()) {
      pts.push_back(c.arc().start);
      pts.push_back(c.arc().mid);
      pts.push_back(c.arc().end);
    } else {
      pts.push_back(c.line().a);
      pts.push_back(c.line().b);
    }
  }
  return pts;
}

}  // namespace

SurfaceGeom infer_surface(const std::vector<Wire>& wires,
                          const std::vector<CurveGeom>& curves,
                          const Tolerances& tol, bool* plane_disk_ambiguity) {
  if (wires.empty() || curves.empty())
    throw UnclassifiableFace("no boundary to classify");
  const double eps = tol.geom_eps;
  const std::vector<Vec3> pts = defining_points(curves);

  std::vector<const Arc3*> arcs;
  std::vector<const LineSeg*> lines;
  for (const CurveGeom& c : curves) {
    if (c.is_arc())
      arcs.push_back(&c.arc());
    else
      lines.push_back(&c.line());
  }

  const PlaneFit fit = fit_plane(pts, eps);
  if (fit.degenerate) throw UnclassifiableFace("boundary points are collinear");
  if (fit.coplanar) {
    if (plane_disk_ambiguity && lines.empty() && !arcs.empty()) {
      // A lone circular boundary could also bound a hemisphere; the planar
      // reading wins but the case is worth surfacing.
      bool one_circle = true;
      for (const Arc3* a : arcs)
        one_circle = one_circle &&
                     (a->center - arcs[0]->center).norm() <= eps &&
                     std::abs(a->radius - arcs[0]->radius) <= eps;
      *plane_disk_ambiguity = one_circle;
    }
    return Plane{fit.normal, fit.offset};
  }

  if (!arcs.empty() && !lines.empty()) {
    const Vec3 n0 = arcs[0]->normal;
    const Vec3 c0 = arcs[0]->center;
    const double r0 = arcs[0]->radius;
    bool cyl = true;
    for (const Arc3* a : arcs) {
      cyl = cyl && std::abs(a->radius - r0) <= eps;
      cyl = cyl && a->normal.cross(n0).norm() <= eps;
      const Vec3 d = a->center - c0;
      cyl = cyl && (d - d.dot(n0) * n0).norm() <= eps;
    }
    for (const LineSeg* l : lines)
      cyl = cyl && (l->b - l->a).normalized().cross(n0).norm() <= eps;
    if (cyl) return Cylinder{c0, n0, r0};

    // Cone: interpolate the arc radii along the axis through the centers.
    if (arcs.size() < 2)
      throw UnclassifiableFace("cone needs at least two arcs");
    Vec3 far = arcs[0]->center;
    double sep = 0;
    for (const Arc3* a : arcs) {
      const double d = (a->center - c0).norm();
      if (d > sep) {
        sep = d;
        far = a->center;
      }
    }
    if (sep <= eps) throw UnclassifiableFace("cone arc centers coincide");
    Vec3 dir = (far - c0).normalized();

    double st = 0, sr = 0, stt = 0, str = 0;
    for (const Arc3* a : arcs) {
      const double t = (a->center - c0).dot(dir);
      st += t;
      sr += a->radius;
      stt += t * t;
      str += t * a->radius;
    }
    const double n = double(arcs.size());
    const double denom = stt - st * st / n;
    if (denom <= eps * eps) throw UnclassifiableFace("cone stations degenerate");
    const double k = (str - st * sr / n) / denom;
    const double rbar = sr / n, tbar = st / n;
    if (std::abs(k) <= 1e-9) throw UnclassifiableFace("arc radii do not vary along the axis");
    // radius(t) = rbar + k (t - tbar), t measured along dir from c0; the
    // apex sits where the radius reaches zero.
    const Vec3 apex = c0 + (tbar - rbar / k) * dir;
    if (k < 0) dir = -dir;
    const double half = std::atan(std::abs(k));
    if (!(half > 0 && half < kPi / 2)) throw UnclassifiableFace("cone angle out of range");
    return Cone{apex, dir, half};
  }

  if (!arcs.empty()) {
    // Sphere: some arc's center must be equidistant from every arc point.
    for (const Arc3* cand : arcs) {
      bool ok = true;
      for (const Vec3& p : pts)
        ok = ok && std::abs((p - cand->center).norm() - cand->radius) <= eps;
      if (ok) return Sphere{cand->center, cand->radius};
    }
    if (arcs.size() < 2) throw UnclassifiableFace("single non-spherical arc");
    std::vector<const Arc3*> by_r = arcs;
    std::sort(by_r.begin(), by_r.end(),
              [](const Arc3* a, const Arc3* b) { return a->radius > b->radius; });
    const double major = 0.5 * (by_r[0]->radius + by_r[1]->radius);
    const double minor = by_r.back()->radius;
    if (!(major > minor && minor > 0))
      throw UnclassifiableFace("torus radii out of order");
    const Vec3 dir = by_r[0]->normal;
    const Vec3 c_big = by_r[0]->center;
    const Vec3 c_small = by_r.back()->center;
    const Vec3 center = c_big + (c_small - c_big).dot(dir) * dir;
    return Torus{center, dir, major, minor};
  }

  throw UnclassifiableFace("non-coplanar face bounded by lines only");
}

// ---------------------------------------------------------------------------
// Parameter-domain projection

namespace {

// Raw surface parameters per point, unwrapped continuously along a wire,
// then scaled to an approximately metric 2D domain.
class SurfaceUV {
 public:
  SurfaceUV(const SurfaceGeom& s, const std::vector<Vec3>& boundary)
      : surf_(s) {
    if (const Cylinder* cy = std::get_if<Cylinder>(&surf_)) {
      e1_ = cy->dir.unitOrthogonal();
      e2_ = cy->dir.cross(e1_);
    } else if (const Cone* co = std::get_if<Cone>(&surf_)) {
      e1_ = co->dir.unitOrthogonal();
      e2_ = co->dir.cross(e1_);
    } else if (const Sphere* sp = std::get_if<Sphere>(&surf_)) {
      // Polar axis perpendicular to the face's mean direction keeps the
      // poles off the face for any boundary within a sub-hemispherical cap.
      Vec3 w = Vec3::Zero();
      for (const Vec3& p : boundary) w += (p - sp->center).normalized();
      if (w.norm() < 1e-9) w = Vec3::UnitZ();
      w.normalize();
      axis_ = w.unitOrthogonal();
      e1_ = w;
      e2_ = axis_.cross(e1_);
    } else if (const Torus* to = std::get_if<Torus>(&surf_)) {
      e1_ = to->dir.unitOrthogonal();
      e2_ = to->dir.cross(e1_);
    } else {
      const Plane& pl = std::get<Plane>(surf_);
      origin_ = pl.normal * pl.offset;
      e1_ = pl.normal.unitOrthogonal();
      e2_ = pl.normal.cross(e1_);
    }
  }

  // Raw parameters (periodic components unwrapped against prev).
  Vec2 raw(const Vec3& p, const Vec2* prev) const {
    if (std::holds_alternative<Plane>(surf_)) {
      const Vec3 q = p - origin_;
      return {q.dot(e1_), q.dot(e2_)};
    }
    if (const Cylinder* cy = std::get_if<Cylinder>(&surf_)) {
      const Vec3 q = p - cy->point;
      const double z = q.dot(cy->dir);
      const Vec3 w = q - z * cy->dir;
      const double phi = unwrap(std::atan2(w.dot(e2_), w.dot(e1_)), prev, 0);
      return {phi, z};
    }
    if (const Cone* co = std::get_if<Cone>(&surf_)) {
      const Vec3 q = p - co->apex;
      const double t = q.dot(co->dir);
      const Vec3 w = q - t * co->dir;
      const double phi = unwrap(std::atan2(w.dot(e2_), w.dot(e1_)), prev, 0);
      return {phi, q.norm()};  // slant distance from the apex
    }
    if (const Sphere* sp = std::get_if<Sphere>(&surf_)) {
      const Vec3 q = (p - sp->center) / sp->radius;
      const double v = std::acos(std::clamp(q.dot(axis_), -1.0, 1.0));
      double phi = prev ? prev->x() : 0.0;
      const Vec3 w = q - q.dot(axis_) * axis_;
      if (w.norm() > 1e-12)
        phi = unwrap(std::atan2(w.dot(e2_), w.dot(e1_)), prev, 0);
      return {phi, v};
    }
    const Torus& to = std::get<Torus>(surf_);
    const Vec3 q = p - to.center;
    const double z = q.dot(to.dir);
    const Vec3 w = q - z * to.dir;
    const double rho = w.norm();
    Vec2 out;
    out.x() = unwrap(rho > 1e-12 ? std::atan2(w.dot(e2_), w.dot(e1_))
                                 : (prev ? prev->x() : 0.0),
                     prev, 0);
    out.y() = unwrap(std::atan2(z, rho - to.major_radius), prev, 1);
    return out;
  }

  // Raw parameters scaled to approximate arc length.
  Vec2 metric(const Vec2& raw) const {
    if (std::holds_alternative<Plane>(surf_)) return raw;
    if (const Cylinder* cy = std::get_if<Cylinder>(&surf_))
      return {raw.x() * cy->radius, raw.y()};
    if (const Cone* co = std::get_if<Cone>(&surf_)) {
      // True development: (slant, azimuth) -> annular sector.
      const double psi = raw.x() * std::sin(co->half_angle);
      return {raw.y() * std::cos(psi), raw.y() * std::sin(psi)};
    }
    if (const Sphere* sp = std::get_if<Sphere>(&surf_))
      return {raw.x() * sp->radius, raw.y() * sp->radius};
    const Torus& to = std::get<Torus>(surf_);
    return {raw.x() * to.major_radius, raw.y() * to.minor_radius};
  }

 private:
  static double unwrap(double angle, const Vec2* prev, int comp) {
    if (!prev) return angle;
    const double ref = comp == 0 ? prev->x() : prev->y();
    return angle + kTwoPi * std::round((ref - angle) / kTwoPi);
  }

  SurfaceGeom surf_;
  Vec3 origin_ = Vec3::Zero();
  Vec3 axis_ = Vec3::UnitZ();  // sphere polar axis
  Vec3 e1_ = Vec3::UnitX(), e2_ = Vec3::UnitY();
};

double loop_area(const std::vector<Vec2>& loop) {
  double a = 0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const Vec2& p = loop[i];
    const Vec2& q = loop[(i + 1) % loop.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

// ---------------------------------------------------------------------------
// Triangulation

std::vector<std::array<int, 3>> triangulate_polygon(
    const std::vector<std::vector<Vec2>>& loops) {
  if (loops.empty() || loops[0].size() < 3)
    throw KernelError("triangulation: degenerate outer loop");

  std::vector<Vec2> pts;
  std::vector<std::vector<int>> ids(loops.size());
  for (size_t li = 0; li < loops.size(); ++li)
    for (const Vec2& p : loops[li]) {
      ids[li].push_back(int(pts.size()));
      pts.push_back(p);
    }

  Vec2 lo = pts[0], hi = pts[0];
  for (const Vec2& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-12);
  const double area_eps = 1e-12 * scale * scale;
  const double pt_eps = 1e-9 * scale;

  std::vector<int> poly = ids[0];

  // Bridge each hole to the enclosing polygon, rightmost holes first.
  std::vector<size_t> hole_order;
  for (size_t li = 1; li < loops.size(); ++li) hole_order.push_back(li);
  std::sort(hole_order.begin(), hole_order.end(), [&](size_t a, size_t b) {
    double xa = -1e300, xb = -1e300;
    for (const Vec2& p : loops[a]) xa = std::max(xa, p.x());
    for (const Vec2& p : loops[b]) xb = std::max(xb, p.x());
    return xa > xb;
  });

  for (size_t hi_loop : hole_order) {
    const std::vector<int>& hole = ids[hi_loop];
    if (hole.size() < 3) throw KernelError("triangulation: degenerate hole");

    int m_pos = 0;
    for (size_t i = 1; i < hole.size(); ++i)
      if (pts[hole[i]].x() > pts[hole[m_pos]].x() ||
          (pts[hole[i]].x() == pts[hole[m_pos]].x() &&
           pts[hole[i]].y() > pts[hole[m_pos]].y()))
        m_pos = int(i);
    const Vec2 m = pts[hole[m_pos]];

    // Cast a ray in +x from the hole's rightmost vertex.
    int edge_i = -1;
    double best_x = std::numeric_limits<double>::max();
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = pts[poly[i]];
      const Vec2& b = pts[poly[(i + 1) % poly.size()]];
      if ((a.y() <= m.y() && b.y() >= m.y()) || (b.y() <= m.y() && a.y() >= m.y())) {
        if (std::abs(b.y() - a.y()) < 1e-300) continue;
        const double x = a.x() + (m.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
        if (x >= m.x() - pt_eps && x < best_x) {
          best_x = x;
          edge_i = int(i);
        }
      }
    }
    if (edge_i < 0) throw KernelError("triangulation: hole outside the outer loop");

    const Vec2 inter(best_x, m.y());
    const int a_id = poly[edge_i];
    const int b_id = poly[(edge_i + 1) % poly.size()];
    int bridge_pos = pts[a_id].x() > pts[b_id].x() ? edge_i
                                                   : int((edge_i + 1) % poly.size());
    // Any reflex vertex inside triangle (m, inter, bridge) blocks the
    // bridge; pick the one closest in angle to the ray instead.
    const Vec2 bp = pts[poly[bridge_pos]];
    double best_metric = std::numeric_limits<double>::max();
    for (size_t i = 0; i < poly.size(); ++i) {
      if (int(i) == bridge_pos) continue;
      const Vec2& prev = pts[poly[(i + poly.size() - 1) % poly.size()]];
      const Vec2& cur = pts[poly[i]];
      const Vec2& nxt = pts[poly[(i + 1) % poly.size()]];
      if (cross2(prev, cur, nxt) >= 0) continue;  // convex, cannot block
      const bool inside = cross2(m, inter, cur) >= -area_eps &&
                          cross2(inter, bp, cur) >= -area_eps &&
                          cross2(bp, m, cur) >= -area_eps;
      if (!inside) continue;
      const double dx = cur.x() - m.x(), dy = std::abs(cur.y() - m.y());
      if (dx <= 0) continue;
      const double metric = dy / dx;  // tan of angle to the +x ray
      if (metric < best_metric) {
        best_metric = metric;
        bridge_pos = int(i);
      }
    }

    std::vector<int> merged;
    merged.reserve(poly.size() + hole.size() + 2);
    for (int i = 0; i <= bridge_pos; ++i) merged.push_back(poly[i]);
    for (size_t k = 0; k <= hole.size(); ++k)
      merged.push_back(hole[(m_pos + k) % hole.size()]);
    for (size_t i = bridge_pos; i < poly.size(); ++i) merged.push_back(poly[i]);
    poly = std::move(merged);
  }

  // Ear clipping.
  std::vector<std::array<int, 3>> tris;
  std::vector<int> v = poly;
  int stuck_guard = 0;
  while (v.size() > 3) {
    const int n = int(v.size());
    bool clipped = false;
    for (int i = 0; i < n && !clipped; ++i) {
      const int ip = (i + n - 1) % n, in = (i + 1) % n;
      const Vec2& a = pts[v[ip]];
      const Vec2& b = pts[v[i]];
      const Vec2& c = pts[v[in]];
      const double area2 = cross2(a, b, c);
      if (area2 <= area_eps) continue;  // reflex or degenerate corner
      bool blocked = false;
      for (int j = 0; j < n && !blocked; ++j) {
        if (j == ip || j == i || j == in) continue;
        const Vec2& p = pts[v[j]];
        if ((p - a).norm() <= pt_eps || (p - b).norm() <= pt_eps ||
            (p - c).norm() <= pt_eps)
          continue;  // bridge duplicates share coordinates with corners
        blocked = cross2(a, b, p) >= -area_eps && cross2(b, c, p) >= -area_eps &&
                  cross2(c, a, p) >= -area_eps;
      }
      if (!blocked) {
        tris.push_back({v[ip], v[i], v[in]});
        v.erase(v.begin() + i);
        clipped = true;
      }
    }
    if (!clipped) {
      // Drop one degenerate corner (collinear or spike) and retry.
      bool removed = false;
      for (int i = 0; i < n && !removed; ++i) {
        const Vec2& a = pts[v[(i + n - 1) % n]];
        const Vec2& b = pts[v[i]];
        const Vec2& c = pts[v[(i + 1) % n]];
        if (std::abs(cross2(a, b, c)) <= area_eps) {
          v.erase(v.begin() + i);
          removed = true;
        }
      }
      if (!removed && ++stuck_guard > 2) throw KernelError("ear clipping failed");
      if (removed) stuck_guard = 0;
    }
  }
  if (v.size() == 3) {
    const double area2 = cross2(pts[v[0]], pts[v[1]], pts[v[2]]);
    if (area2 > area_eps) tris.push_back({v[0], v[1], v[2]});
  }
  if (tris.empty()) throw KernelError("triangulation produced no triangles");
  return tris;
}

// ---------------------------------------------------------------------------
// Face building

void build_face(FaceRecon& face, const Tolerances& tol) {
  if (!face.surface) throw KernelError("build_face: surface not classified");
  const SurfaceGeom& surf = *face.surface;

  // Discretize every wire once; per-edge samples share junction points.
  std::vector<std::vector<Vec3>> loops3d(face.wires.size());
  std::vector<Vec3> all_pts;
  for (size_t wi = 0; wi < face.wires.size(); ++wi) {
    for (const WireEdge& we : face.wires[wi].edges) {
      const CurveGeom& c = face.curves[we.curve];
      const int segs = c.is_arc() ? arc_segments(c.arc(), tol) : 1;
      std::vector<Vec3> pts = c.sample(segs);
      if (we.reversed) std::reverse(pts.begin(), pts.end());
      pts.pop_back();  // the next edge starts where this one ends
      loops3d[wi].insert(loops3d[wi].end(), pts.begin(), pts.end());
    }
    all_pts.insert(all_pts.end(), loops3d[wi].begin(), loops3d[wi].end());
  }

  const SurfaceUV uv(surf, all_pts);

  std::vector<std::vector<Vec2>> loops2d(face.wires.size());
  std::optional<Vec2> anchor;
  for (size_t wi = 0; wi < face.wires.size(); ++wi) {
    Vec2 prev;
    bool have_prev = false;
    for (const Vec3& p : loops3d[wi]) {
      const Vec2 r = uv.raw(p, have_prev ? &prev
                                         : (anchor ? &*anchor : nullptr));
      loops2d[wi].push_back(uv.metric(r));
      prev = r;
      have_prev = true;
      if (!anchor) anchor = r;
    }
    // A loop that returns to its start with net winding crosses the seam.
    if (!loops3d[wi].empty()) {
      const Vec2 closing = uv.raw(loops3d[wi][0], &prev);
      if ((uv.metric(closing) - loops2d[wi][0]).norm() > 1e-6)
        throw KernelError("wire crosses the parameter seam");
    }
  }

  // Keep the projected loops even if triangulation fails below; the
  // validity checks still want to look at them.
  auto store_loops = [&]() {
    face.uv_loops.clear();
    for (const auto& loop : loops2d) {
      Polyline pl;
      for (const Vec2& p : loop) pl.push_back(Vec3(p.x(), p.y(), 0.0));
      face.uv_loops.push_back(std::move(pl));
    }
  };
  store_loops();

  // Outer loop counter-clockwise, holes clockwise. The wires' stored
  // direction flips with them so downstream orientation checks agree.
  auto reverse_wire = [&](size_t wi) {
    std::reverse(face.wires[wi].edges.begin(), face.wires[wi].edges.end());
    for (WireEdge& we : face.wires[wi].edges) we.reversed = !we.reversed;
    // Loop points: keep the first point first, reverse the traversal.
    std::reverse(loops2d[wi].begin() + 1, loops2d[wi].end());
    std::reverse(loops3d[wi].begin() + 1, loops3d[wi].end());
  };

  const double outer_area = loop_area(loops2d[0]);
  Vec2 lo = loops2d[0][0], hi = loops2d[0][0];
  for (const Vec2& p : loops2d[0]) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-12);
  if (std::abs(outer_area) <= 1e-12 * scale * scale)
    throw KernelError("degenerate parameter domain");
  if (outer_area < 0)
    for (size_t wi = 0; wi < face.wires.size(); ++wi) reverse_wire(wi);
  for (size_t wi = 1; wi < face.wires.size(); ++wi)
    if (loop_area(loops2d[wi]) > 0) {
      reverse_wire(wi);
      face.inner_reoriented = true;
    }
  store_loops();

  const auto tris = triangulate_polygon(loops2d);

  std::vector<Vec3> flat3d;
  for (const auto& loop : loops3d) flat3d.insert(flat3d.end(), loop.begin(), loop.end());
  std::vector<Vec2> flat2d;
  for (const auto& loop : loops2d) flat2d.insert(flat2d.end(), loop.begin(), loop.end());

  face.uv_polygon_area = 0;
  for (const auto& loop : loops2d) face.uv_polygon_area += loop_area(loop);
  face.uv_triangle_area = 0;

  face.mesh.positions = flat3d;
  face.mesh.triangles.clear();
  for (const auto& t : tris) {
    face.uv_triangle_area +=
        0.5 * cross2(flat2d[t[0]], flat2d[t[1]], flat2d[t[2]]);
    const Vec3 a = flat3d[t[0]], b = flat3d[t[1]], c = flat3d[t[2]];
    if ((b - a).cross(c - a).norm() > 1e-16) face.mesh.triangles.push_back(t);
  }
  if (face.mesh.triangles.empty())
    throw KernelError("triangulation produced no usable triangles");
}

// ---------------------------------------------------------------------------
// Whole-model pipeline

namespace {

// Oriented use of a source edge by a face: true when some wire traverses
// the curve in its stored direction.
struct EdgeUse {
  int face = -1;
  bool forward = true;
};

std::map<int, std::vector<EdgeUse>> collect_edge_uses(const SolidModel& m) {
  std::map<int, std::vector<EdgeUse>> uses;
  for (size_t fi = 0; fi < m.faces.size(); ++fi) {
    const FaceRecon& f = m.faces[fi];
    if (!f.ok) continue;
    for (const Wire& w : f.wires)
      for (const WireEdge& we : w.edges) {
        const bool fwd = !we.reversed;
        uses[f.curves[we.curve].source_edge].push_back(
            {int(fi), f.flipped ? !fwd : fwd});
      }
  }
  return uses;
}

void orient_shells(SolidModel& m, std::vector<std::string>& notes) {
  // Union faces sharing edges into shells, then flip faces breadth-first so
  // shared edges are traversed in opposite directions.
  std::map<int, std::vector<int>> edge_faces;
  for (size_t fi = 0; fi < m.faces.size(); ++fi) {
    if (!m.faces[fi].ok) continue;
    for (int e : m.faces[fi].edge_ids) edge_faces[e].push_back(int(fi));
  }

  std::vector<int> shell_of(m.faces.size(), -1);
  m.shells.clear();
  for (size_t seed = 0; seed < m.faces.size(); ++seed) {
    if (!m.faces[seed].ok || shell_of[seed] >= 0) continue;
    const int sid = int(m.shells.size());
    m.shells.push_back({});
    std::vector<int> stack{int(seed)};
    shell_of[seed] = sid;
    while (!stack.empty()) {
      const int fi = stack.back();
      stack.pop_back();
      m.shells[sid].push_back(fi);
      for (int e : m.faces[fi].edge_ids)
        for (int nf : edge_faces[e])
          if (m.faces[nf].ok && shell_of[nf] < 0) {
            shell_of[nf] = sid;
            stack.push_back(nf);
          }
    }
    std::sort(m.shells[sid].begin(), m.shells[sid].end());
  }

  // Per-face oriented uses, before any flips.
  std::map<int, std::vector<EdgeUse>> uses;
  for (size_t fi = 0; fi < m.faces.size(); ++fi) {
    FaceRecon& f = m.faces[fi];
    f.flipped = false;
    if (!f.ok) continue;
    for (const Wire& w : f.wires)
      for (const WireEdge& we : w.edges)
        uses[f.curves[we.curve].source_edge].push_back({int(fi), !we.reversed});
  }

  std::vector<char> visited(m.faces.size(), 0);
  for (const auto& shell : m.shells) {
    if (shell.empty()) continue;
    std::vector<int> queue{shell[0]};
    visited[shell[0]] = 1;
    while (!queue.empty()) {
      const int fi = queue.back();
      queue.pop_back();
      for (int e : m.faces[fi].edge_ids) {
        const auto it = uses.find(e);
        if (it == uses.end() || it->second.size() != 2) continue;
        const EdgeUse &u0 = it->second[0], &u1 = it->second[1];
        const int other = u0.face == fi ? u1.face : u0.face;
        if (other == fi) continue;
        const bool f_fwd = (u0.face == fi ? u0.forward : u1.forward) ^
                           bool(m.faces[fi].flipped);
        const bool o_fwd = (u0.face == fi ? u1.forward : u0.forward) ^
                           bool(m.faces[other].flipped);
        if (!visited[other]) {
          visited[other] = 1;
          if (f_fwd == o_fwd) m.faces[other].flipped = true;
          queue.push_back(other);
        } else if (f_fwd == o_fwd) {
          notes.push_back("shell is not orientable across edge " + std::to_string(e));
        }
      }
    }
  }

  // Outward orientation for closed shells via the signed volume.
  double volume = 0;
  for (const FaceRecon& f : m.faces) {
    if (!f.ok) continue;
    for (const auto& t : f.mesh.triangles) {
      Vec3 a = f.mesh.positions[t[0]], b = f.mesh.positions[t[1]],
           c = f.mesh.positions[t[2]];
      if (f.flipped) std::swap(b, c);
      volume += a.dot(b.cross(c)) / 6.0;
    }
  }
  if (volume < 0) {
    for (FaceRecon& f : m.faces)
      if (f.ok) f.flipped = !f.flipped;
    notes.push_back("shell orientation flipped outward");
  }
}

}  // namespace

ValidityReport validate(const SolidModel& model, const IndexedBRep& b,
                        const Tolerances& tol) {
  ValidityReport r;
  r.notes.clear();

  // 1. Every face produced at least one triangle.
  r.triangulatable = !model.faces.empty();
  for (const FaceRecon& f : model.faces) {
    if (!f.ok || f.mesh.triangles.empty()) {
      r.triangulatable = false;
      if (!f.error.empty()) r.notes.push_back("face failed: " + f.error);
    }
  }

  // 2. Consecutive oriented edges of every wire share endpoints. Wires of
  // faces that failed later stages still count.
  r.wire_order_ok = true;
  for (const FaceRecon& f : model.faces) {
    for (const Wire& w : f.wires) {
      for (size_t k = 0; k < w.edges.size(); ++k) {
        const WireEdge& cur = w.edges[k];
        const WireEdge& nxt = w.edges[(k + 1) % w.edges.size()];
        const CurveGeom& cc = f.curves[cur.curve];
        const CurveGeom& nc = f.curves[nxt.curve];
        const Vec3 tail = cur.reversed ? cc.start() : cc.end();
        const Vec3 head = nxt.reversed ? nc.end() : nc.start();
        if ((tail - head).norm() > tol.wire_eps) r.wire_order_ok = false;
      }
    }
  }

  // 3. No wire self-intersects in the surface's parameter domain.
  r.no_self_intersection = true;
  for (const FaceRecon& f : model.faces) {
    if (f.uv_loops.empty()) continue;
    if (polyline_self_intersects(f.uv_loops, tol.wire_eps))
      r.no_self_intersection = false;
  }

  // 4. Shell edges appear once, or twice with opposite orientations.
  r.no_bad_edges = true;
  const auto uses = collect_edge_uses(model);
  size_t used_edges = 0;
  bool all_twice = true;
  for (const auto& [edge, list] : uses) {
    ++used_edges;
    if (list.size() > 2) r.no_bad_edges = false;
    if (list.size() == 2 && list[0].forward == list[1].forward)
      r.no_bad_edges = false;
    if (list.size() != 2) all_twice = false;
  }
  bool all_faces_ok = !model.faces.empty();
  for (const FaceRecon& f : model.faces) all_faces_ok = all_faces_ok && f.ok;
  r.closed_solid =
      all_faces_ok && all_twice && used_edges == b.edges.size() && used_edges > 0;
  return r;
}

SolidModel reconstruct(const IndexedBRep& b, const QuantGrid& grid,
                       const Tolerances& tol) {
  tol.check();
  grid.check();
  SolidModel m;
  m.grid = grid;
  m.faces.resize(b.faces.size());

  std::vector<std::string> notes;
  for (size_t fi = 0; fi < b.faces.size(); ++fi) {
    FaceRecon& f = m.faces[fi];
    f.edge_ids = b.faces[fi];
    try {
      for (int e : f.edge_ids) {
        if (e < 0 || e >= int(b.edges.size()))
          throw KernelError("edge index out of range");
        f.curves.push_back(build_curve(b.edges[e], e, b, grid, tol, &notes));
      }
      f.wires = assemble_wires(f.curves, tol);
      f.surface = infer_surface(f.wires, f.curves, tol, &f.plane_disk_ambiguity);
      build_face(f, tol);
      f.ok = true;
      if (f.plane_disk_ambiguity)
        notes.push_back("face " + std::to_string(fi) +
                        ": single-circle boundary read as a plane");
    } catch (const std::exception& e) {
      f.ok = false;
      f.error = e.what();
    }
  }

  orient_shells(m, notes);
  m.report = validate(m, b, tol);
  m.report.notes.insert(m.report.notes.end(), notes.begin(), notes.end());
  return m;
}

}  // namespace ibrep
