#include "ibrep/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ibrep {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// CCW angle of p about `normal`, measured from `ref`, in [0, 2*pi).
// Both vectors must be radial (center already subtracted) and nonzero.
double ccw_angle(const Vec3& ref, const Vec3& p, const Vec3& normal) {
  const double s = ref.cross(p).dot(normal);
  const double c = ref.dot(p);
  double a = std::atan2(s, c);
  if (a < 0) a += kTwoPi;
  return a;
}
}  // namespace

Circle3 circle_through_3(const Vec3& a, const Vec3& b, const Vec3& c) {
  if (!a.allFinite() || !b.allFinite() || !c.allFinite())
    throw GeomError("circle_through_3: non-finite input");
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  const Vec3 w = u.cross(v);
  const double w2 = w.squaredNorm();
  const double scale = u.norm() * v.norm();
  if (scale == 0 || std::sqrt(w2) <= 1e-12 * scale)
    throw CollinearPoints("circle_through_3: points are collinear");

  // Solve for the circumcenter in the (u, v) basis:
  //   (o-a).u = |u|^2/2,  (o-a).v = |v|^2/2, with o-a = alpha*u + beta*v.
  const double uu = u.squaredNorm();
  const double vv = v.squaredNorm();
  const double uv = u.dot(v);
  const double det = uu * vv - uv * uv;  // equals |w|^2
  const double alpha = (vv * (uu - uv)) / (2.0 * det);
  const double beta = (uu * (vv - uv)) / (2.0 * det);

  Circle3 circ;
  circ.center = a + alpha * u + beta * v;
  circ.radius = (circ.center - a).norm();
  circ.normal = w / std::sqrt(w2);
  return circ;
}

Vec3 Arc3::point_at(double t) const {
  const Eigen::AngleAxisd rot(t * sweep, normal);
  return center + rot * (start - center);
}

Arc3 make_arc(const Vec3& start, const Vec3& mid, const Vec3& end) {
  const Circle3 circ = circle_through_3(start, mid, end);
  Arc3 arc;
  arc.start = start;
  arc.mid = mid;
  arc.end = end;
  arc.center = circ.center;
  arc.radius = circ.radius;
  arc.normal = circ.normal;
  // With normal = (mid-start) x (end-start) the traversal
  // start -> mid -> end is CCW, so theta(mid) < theta(end).
  const Vec3 r0 = start - circ.center;
  arc.sweep = ccw_angle(r0, end - circ.center, circ.normal);
  return arc;
}

Vec3 eval_arc_midparam(const Arc3& arc) { return arc.point_at(0.5); }

PlaneFit fit_plane(const std::vector<Vec3>& points, double eps) {
  if (points.size() < 3) throw GeomError("fit_plane: need at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= double(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);

  PlaneFit fit;
  fit.normal = es.eigenvectors().col(0);  // smallest eigenvalue
  fit.normal.normalize();
  fit.offset = fit.normal.dot(centroid);
  for (const Vec3& p : points)
    fit.max_dist = std::max(fit.max_dist, std::abs(fit.normal.dot(p) - fit.offset));
  fit.coplanar = fit.max_dist <= eps;

  // Collinear input: the two smallest eigenvalues both vanish and any plane
  // containing the line fits. Flag it but still return one such plane.
  const double spread = es.eigenvalues()(2);
  fit.degenerate = spread <= 0 || es.eigenvalues()(1) <= 1e-12 * spread;
  return fit;
}

double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2) {
  // Clamped closest-point computation between two segments.
  const Vec3 d1 = p2 - p1;
  const Vec3 d2 = q2 - q1;
  const Vec3 r = p1 - q1;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);

  double s = 0, t = 0;
  if (a <= 1e-30 && e <= 1e-30) {
    return r.norm();
  } else if (a <= 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 1e-30)
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p1 + s * d1 - (q1 + t * d2)).norm();
}

bool polyline_self_intersects(const std::vector<Polyline>& wires, double eps) {
  for (const Polyline& raw : wires) {
    // Drop repeated neighbors so adjacency is well defined.
    Polyline loop;
    for (const Vec3& p : raw) {
      if (loop.empty() || (p - loop.back()).norm() > 1e-12) loop.push_back(p);
    }
    while (loop.size() > 1 && (loop.front() - loop.back()).norm() <= 1e-12)
      loop.pop_back();
    const int n = int(loop.size());
    if (n < 4) continue;  // a triangle has no non-adjacent segment pairs

    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // wraps around, adjacent
        const double d = segment_distance(loop[i], loop[(i + 1) % n],
                                          loop[j], loop[(j + 1) % n]);
        if (d <= eps) return true;
      }
    }
  }
  return false;
}

}  // namespace ibrep
