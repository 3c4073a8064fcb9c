#pragma once

#include "ibrep/indexed_brep.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ibrep {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CollinearArc : KernelError {
  using KernelError::KernelError;
};
struct OpenWire : KernelError {
  using KernelError::KernelError;
};
struct NestedAmbiguity : KernelError {
  using KernelError::KernelError;
};
struct UnclassifiableFace : KernelError {
  using KernelError::KernelError;
};

/// A dereferenced hyperedge: a line or an arc with resolved endpoints.
struct CurveGeom {
  std::variant<LineSeg, Arc3> geom;
  int source_edge = -1;       // index into IndexedBRep::edges
  BinTriple start_bin{}, end_bin{};  // quantized endpoint keys

  bool is_arc() const { return std::holds_alternative<Arc3>(geom); }
  const Arc3& arc() const { return std::get<Arc3>(geom); }
  const LineSeg& line() const { return std::get<LineSeg>(geom); }

  Vec3 start() const;
  Vec3 end() const;
  /// Unit tangent at t=0 / t=1 pointing along the traversal direction.
  Vec3 start_tangent() const;
  Vec3 end_tangent() const;
  /// Polyline from start to end, `segments` + 1 points. Lines always use
  /// one segment.
  std::vector<Vec3> sample(int segments) const;
};

/// Number of polyline segments used for an arc: chords are kept near twice
/// the wire tolerance so proximity checks do not trip on the sampling
/// itself, with a floor of 8 and a cap of tol.arc_samples.
int arc_segments(const Arc3& arc, const Tolerances& tol);

struct WireEdge {
  int curve = -1;  // index into the face's curve list
  bool reversed = false;
};

struct Wire {
  std::vector<WireEdge> edges;
  bool outer = false;
};

struct Plane {
  Vec3 normal;
  double offset = 0;  // normal.dot(p) == offset
};
struct Cylinder {
  Vec3 point;  // a point on the axis
  Vec3 dir;    // unit axis direction
  double radius = 0;
};
struct Cone {
  Vec3 apex;
  Vec3 dir;  // unit, pointing from the apex toward growing radius
  double half_angle = 0;  // in (0, pi/2)
};
struct Sphere {
  Vec3 center;
  double radius = 0;
};
struct Torus {
  Vec3 center;
  Vec3 dir;  // unit axis direction
  double major_radius = 0;
  double minor_radius = 0;
};
using SurfaceGeom = std::variant<Plane, Cylinder, Cone, Sphere, Torus>;

const char* surface_type_name(const SurfaceGeom& s);

/// Unsigned distance from a point to the surface.
double surface_distance(const SurfaceGeom& s, const Vec3& p);

struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
};

/// One reconstructed face with everything derived from its edge list.
struct FaceRecon {
  std::vector<int> edge_ids;       // into IndexedBRep::edges
  std::vector<CurveGeom> curves;   // local curve list
  std::vector<Wire> wires;
  std::optional<SurfaceGeom> surface;
  TriMesh mesh;
  std::vector<Polyline> uv_loops;  // near-metric uv polylines, z = 0
  double uv_polygon_area = 0;      // holes subtracted
  double uv_triangle_area = 0;
  bool ok = false;
  bool flipped = false;            // set by shell orientation propagation
  bool plane_disk_ambiguity = false;
  bool inner_reoriented = false;
  std::string error;
};

struct ValidityReport {
  bool triangulatable = false;
  bool wire_order_ok = false;
  bool no_self_intersection = false;
  bool no_bad_edges = false;
  bool closed_solid = false;  // informational: every edge used exactly twice
  std::vector<std::string> notes;

  bool all_ok() const {
    return triangulatable && wire_order_ok && no_self_intersection && no_bad_edges;
  }
};

struct SolidModel {
  QuantGrid grid;
  std::vector<FaceRecon> faces;
  std::vector<std::vector<int>> shells;  // face ids grouped by shared edges
  ValidityReport report;
};

/// Which of an arc hyperedge's three points plays the stored-midpoint
/// role: the candidate whose half-parameter evaluation lands back on it.
/// Ties within tolerance are flagged ambiguous and resolved toward the
/// smallest sweep.
struct ArcMidPick {
  int mid_index = -1;  // into the input triple
  Arc3 arc;
  double deviation = 0;
  bool ambiguous = false;
};

ArcMidPick resolve_arc_midpoint(const std::array<Vec3, 3>& pts, double mid_eps);

/// Dereferences every hyperedge into line/arc geometry via
/// resolve_arc_midpoint; ambiguities are reported through `notes`.
std::vector<CurveGeom> build_curves(const IndexedBRep& b, const QuantGrid& grid,
                                    const Tolerances& tol,
                                    std::vector<std::string>* notes = nullptr);

/// Connects the face's curves into closed loops over their quantized
/// endpoints. The loop with the largest sampled bounding box is the outer
/// wire. Throws OpenWire / NestedAmbiguity.
std::vector<Wire> assemble_wires(const std::vector<CurveGeom>& curves,
                                 const Tolerances& tol);

/// The simplest-surface cascade: plane if everything is coplanar, then
/// cylinder/cone for line+arc mixes, then sphere/torus for all-arc faces.
SurfaceGeom infer_surface(const std::vector<Wire>& wires,
                          const std::vector<CurveGeom>& curves,
                          const Tolerances& tol,
                          bool* plane_disk_ambiguity = nullptr);

/// Projects the wires into the surface's parameter domain, orients the
/// outer loop counter-clockwise and holes clockwise, triangulates the
/// polygon with holes by ear clipping, and fills mesh and uv data.
/// Requires `curves`, `wires`, and `surface` to be set.
void build_face(FaceRecon& face, const Tolerances& tol);

/// Full pipeline over every face. Per-face failures are captured in the
/// face records rather than thrown. Also groups faces into shells,
/// propagates a consistent orientation, and runs validate().
SolidModel reconstruct(const IndexedBRep& b, const QuantGrid& grid,
                       const Tolerances& tol = {});

/// The four validity checks plus the closed-solid flag. Deterministic and
/// independent of face order.
ValidityReport validate(const SolidModel& model, const IndexedBRep& b,
                        const Tolerances& tol);

/// Ear-clipping triangulation of a polygon with holes. The first loop is
/// the outer boundary (counter-clockwise), the rest are holes (clockwise).
/// Returned triangles index into the concatenation of all loop points.
std::vector<std::array<int, 3>> triangulate_polygon(
    const std::vector<std::vector<Eigen::Vector2d>>& loops);

}  // namespace ibrep
