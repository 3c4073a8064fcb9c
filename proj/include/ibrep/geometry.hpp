#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <optional>
#include <stdexcept>
#include <vector>

namespace ibrep {

using Vec3 = Eigen::Vector3d;

/// Tolerances shared by the geometry and reconstruction stages. All values
/// are in normalized model units (the model is scaled into the unit cube
/// before quantization).
struct Tolerances {
  double geom_eps = 1e-6;   // coincidence / coplanarity / surface-fit distance
  double wire_eps = 0.01;   // wire ordering and self-intersection distance
  double mid_eps = 0.03;    // arc midpoint acceptance for the permutation test
  int arc_samples = 32;     // max polyline segments per arc

  void check() const {
    if (geom_eps <= 0 || wire_eps <= 0 || mid_eps <= 0 || arc_samples < 8)
      throw std::invalid_argument("invalid tolerances");
  }
};

struct GeomError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CollinearPoints : GeomError {
  using GeomError::GeomError;
};

struct LineSeg {
  Vec3 a, b;

  Vec3 point_at(double t) const { return a + t * (b - a); }
  double length() const { return (b - a).norm(); }
};

struct Circle3 {
  Vec3 center;
  double radius = 0;
  Vec3 normal;  // unit
};

/// Circle through three non-collinear points. The returned normal is the
/// unit direction of (b-a) x (c-a), so traversal a -> b -> c is
/// counter-clockwise about it.
Circle3 circle_through_3(const Vec3& a, const Vec3& b, const Vec3& c);

/// Circular arc defined by three points: start, the point at the arc's
/// middle parameter, and end. Derived fields describe the supporting
/// circle; sweep is the CCW angle from start to end about `normal`,
/// strictly inside (0, 2*pi), with mid at sweep/2.
struct Arc3 {
  Vec3 start, mid, end;
  Vec3 center;
  double radius = 0;
  Vec3 normal;   // unit, CCW traversal start -> mid -> end
  double sweep = 0;

  /// Point at fraction t in [0,1] of the sweep.
  Vec3 point_at(double t) const;
};

/// Builds an arc from (start, mid, end). Throws CollinearPoints when the
/// three points do not define a circle.
Arc3 make_arc(const Vec3& start, const Vec3& mid, const Vec3& end);

/// The point at the angular parameter halfway between start and end,
/// on the same side as mid.
Vec3 eval_arc_midparam(const Arc3& arc);

struct PlaneFit {
  bool coplanar = false;    // max orthogonal distance <= eps
  Vec3 normal;              // unit normal of the least-squares plane
  double offset = 0;        // plane is { p : normal.dot(p) == offset }
  double max_dist = 0;
  bool degenerate = false;  // points collinear, plane not unique
};

/// Least-squares plane through >= 3 points and the coplanarity verdict.
PlaneFit fit_plane(const std::vector<Vec3>& points, double eps);

/// True iff every point lies within eps of the least-squares plane; the
/// fitted plane is returned through `fit` when given.
inline bool coplanar(const std::vector<Vec3>& points, double eps,
                     PlaneFit* fit = nullptr) {
  const PlaneFit f = fit_plane(points, eps);
  if (fit) *fit = f;
  return f.coplanar;
}

/// A wire discretized as a closed loop of points; the segment from the last
/// point back to the first is implied and must not be duplicated.
using Polyline = std::vector<Vec3>;

/// Minimum distance between two segments [p1,p2] and [q1,q2].
double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2);

/// True iff any two non-adjacent segments of the same closed loop pass
/// within eps of each other. Each polyline is one wire; wires are never
/// tested against each other.
bool polyline_self_intersects(const std::vector<Polyline>& wires, double eps);

}  // namespace ibrep
