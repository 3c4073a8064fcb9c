#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibrep/geometry.hpp"

#include <cmath>
#include <random>

using namespace ibrep;

namespace {

std::mt19937_64 rng_for(const char* tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char* p = tag; *p; ++p) h = (h ^ std::uint64_t(*p)) * 1099511628211ull;
  return std::mt19937_64(h);
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (double(g() >> 11) * 0x1.0p-53);
}

Vec3 random_unit(std::mt19937_64& g) {
  while (true) {
    Vec3 v(uniform(g, -1, 1), uniform(g, -1, 1), uniform(g, -1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

// Independent midpoint oracle: walk a dense polyline along the arc and
// bisect its cumulative length.
Vec3 arc_length_bisection(const Arc3& arc, int samples = 200000) {
  std::vector<Vec3> pts;
  pts.reserve(samples + 1);
  for (int i = 0; i <= samples; ++i) pts.push_back(arc.point_at(double(i) / samples));
  std::vector<double> cum(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i)
    cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  const double half = cum.back() / 2;
  for (size_t i = 1; i < pts.size(); ++i)
    if (cum[i] >= half) return pts[i];
  return pts.back();
}

}  // namespace

TEST_CASE("circle through three points") {
  SUBCASE("symmetric unit circle") {
    const Circle3 c = circle_through_3({1, 0, 0}, {0, 1, 0}, {-1, 0, 0});
    CHECK(c.center.norm() == doctest::Approx(0).epsilon(1e-12));
    CHECK(c.radius == doctest::Approx(1.0));
    CHECK(std::abs(c.normal.z()) == doctest::Approx(1.0));
  }

  SUBCASE("collinear points rejected") {
    CHECK_THROWS_AS(circle_through_3({0, 0, 0}, {1, 0, 0}, {2, 0, 0}),
                    CollinearPoints);
  }

  SUBCASE("radius five triple") {
    // Each input is analytically at distance 5 from the origin.
    const Vec3 a(3, 4, 0), b(-4, 3, 0), c(0, -5, 0);
    CHECK(a.norm() == doctest::Approx(5.0));
    CHECK(b.norm() == doctest::Approx(5.0));
    CHECK(c.norm() == doctest::Approx(5.0));
    const Circle3 circ = circle_through_3(a, b, c);
    CHECK(circ.center.norm() < 1e-9);
    CHECK(circ.radius == doctest::Approx(5.0).epsilon(1e-9));
  }

  SUBCASE("equidistance and argument-permutation invariance") {
    auto g = rng_for("circle-perm");
    for (int trial = 0; trial < 200; ++trial) {
      Vec3 p[3];
      for (Vec3& v : p)
        v = Vec3(uniform(g, -2, 2), uniform(g, -2, 2), uniform(g, -2, 2));
      Circle3 ref;
      try {
        ref = circle_through_3(p[0], p[1], p[2]);
      } catch (const CollinearPoints&) {
        continue;
      }
      for (const Vec3& v : p)
        CHECK((v - ref.center).norm() ==
              doctest::Approx(ref.radius).epsilon(1e-9));
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& perm : perms) {
        const Circle3 c = circle_through_3(p[perm[0]], p[perm[1]], p[perm[2]]);
        CHECK((c.center - ref.center).norm() < 1e-9 * (1 + ref.radius));
        CHECK(c.radius == doctest::Approx(ref.radius).epsilon(1e-9));
        CHECK(std::abs(c.normal.dot(ref.normal)) == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("arc midpoint evaluation") {
  SUBCASE("half circle") {
    const Arc3 arc = make_arc({1, 0, 0}, {0, 1, 0}, {-1, 0, 0});
    CHECK((eval_arc_midparam(arc) - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(arc.sweep == doctest::Approx(M_PI));
  }

  SUBCASE("quarter circle") {
    const Vec3 mid(std::sqrt(0.5), std::sqrt(0.5), 0);
    const Arc3 arc = make_arc({1, 0, 0}, mid, {0, 1, 0});
    CHECK((eval_arc_midparam(arc) - mid).norm() < 1e-12);
  }

  SUBCASE("three-quarter sweep matches the arc-length bisection oracle") {
    const double s2 = std::sqrt(0.5);
    const Arc3 arc = make_arc({1, 0, 0}, {-s2, s2, 0}, {0, -1, 0});
    CHECK(arc.sweep == doctest::Approx(1.5 * M_PI));
    const Vec3 oracle = arc_length_bisection(arc);
    CHECK((eval_arc_midparam(arc) - oracle).norm() < 1e-4);
  }

  SUBCASE("result lies on the circle at half the sweep") {
    auto g = rng_for("arc-mid");
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 center(uniform(g, -2, 2), uniform(g, -2, 2), uniform(g, -2, 2));
      const double radius = uniform(g, 0.05, 3.0);
      const Vec3 n = random_unit(g);
      const Vec3 e1 = n.unitOrthogonal();
      const Vec3 e2 = n.cross(e1);
      const double sweep = uniform(g, 0.3, 2 * M_PI - 0.3);
      auto at = [&](double theta) {
        return center + radius * (std::cos(theta) * e1 + std::sin(theta) * e2);
      };
      const Arc3 arc = make_arc(at(0), at(sweep / 2), at(sweep));
      const Vec3 m = eval_arc_midparam(arc);
      CHECK((m - arc.center).norm() ==
            doctest::Approx(arc.radius).epsilon(1e-9));
      CHECK((m - arc.mid).norm() < 1e-9 * (1 + radius));
    }
  }
}

TEST_CASE("plane fitting and coplanarity") {
  const double eps = 1e-6;

  SUBCASE("unit square") {
    const PlaneFit f = fit_plane(
        {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, eps);
    CHECK(f.coplanar);
    CHECK(std::abs(f.normal.z()) == doctest::Approx(1.0));
    CHECK_FALSE(f.degenerate);
  }

  SUBCASE("one corner lifted by 10 eps") {
    const PlaneFit f = fit_plane(
        {{0, 0, 0}, {1, 0, 0}, {1, 1, 10 * eps}, {0, 1, 0}}, eps);
    CHECK_FALSE(f.coplanar);
  }

  SUBCASE("cube corners") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i)
      pts.push_back(Vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
    CHECK_FALSE(fit_plane(pts, eps).coplanar);
  }

  SUBCASE("collinear points flagged degenerate") {
    const PlaneFit f = fit_plane({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}, eps);
    CHECK(f.degenerate);
  }

  SUBCASE("rigid-motion invariance of the residual") {
    auto g = rng_for("plane-rigid");
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Vec3> pts;
      for (int i = 0; i < 12; ++i)
        pts.push_back(Vec3(uniform(g, -1, 1), uniform(g, -1, 1),
                           uniform(g, -0.01, 0.01)));
      const PlaneFit base = fit_plane(pts, eps);

      const Eigen::Quaterniond q =
          Eigen::Quaterniond(uniform(g, -1, 1), uniform(g, -1, 1),
                             uniform(g, -1, 1), uniform(g, -1, 1))
              .normalized();
      const Vec3 t(uniform(g, -5, 5), uniform(g, -5, 5), uniform(g, -5, 5));
      std::vector<Vec3> moved;
      for (const Vec3& p : pts) moved.push_back(q * p + t);
      const PlaneFit rot = fit_plane(moved, eps);
      CHECK(rot.max_dist == doctest::Approx(base.max_dist).epsilon(1e-9));
    }
  }
}

TEST_CASE("coplanar convenience wrapper") {
  PlaneFit fit;
  CHECK(coplanar({{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}, 1e-6, &fit));
  CHECK(std::abs(fit.offset) == doctest::Approx(1.0));
  CHECK_FALSE(coplanar({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1e-6));
}

TEST_CASE("polyline self intersection") {
  const double eps = 0.01;
  const Polyline square = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const Polyline bowtie = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};

  CHECK_FALSE(polyline_self_intersects({square}, eps));
  CHECK(polyline_self_intersects({bowtie}, eps));

  SUBCASE("concentric squares are separate wires") {
    const Polyline inner = {{0.3, 0.3, 0}, {0.7, 0.3, 0}, {0.7, 0.7, 0}, {0.3, 0.7, 0}};
    CHECK_FALSE(polyline_self_intersects({square, inner}, eps));
  }

  SUBCASE("non-adjacent segments within eps are flagged") {
    // A U shape whose arms pass within eps of each other.
    const Polyline pinched = {{0, 0, 0},   {1, 0, 0},     {1, 0.5, 0},
                              {0.2, 0.5, 0}, {0.2, 0.004, 0}, {0, 0.004, 0}};
    CHECK(polyline_self_intersects({pinched}, eps));
  }

  SUBCASE("reversal invariance") {
    auto wires = std::vector<Polyline>{square, bowtie};
    for (const Polyline& w : wires) {
      Polyline rev(w.rbegin(), w.rend());
      CHECK(polyline_self_intersects({w}, eps) ==
            polyline_self_intersects({rev}, eps));
    }
  }
}

TEST_CASE("segment distance") {
  CHECK(segment_distance({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}) ==
        doctest::Approx(1.0));
  CHECK(segment_distance({0, 0, 0}, {1, 0, 0}, {0.5, -1, 0}, {0.5, 1, 0}) ==
        doctest::Approx(0.0));
  CHECK(segment_distance({0, 0, 0}, {1, 0, 0}, {2, 3, 0}, {2, -3, 0}) ==
        doctest::Approx(1.0));
}
