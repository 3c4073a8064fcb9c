#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibrep/dedup.hpp"
#include "ibrep/fixtures.hpp"
#include "ibrep/kernel.hpp"

using namespace ibrep;
namespace fx = ibrep::fixtures;

TEST_CASE("family names round trip") {
  for (fx::Family f : fx::kAllFamilies)
    CHECK(fx::family_from_name(fx::family_name(f)) == f);
  CHECK_THROWS_AS(fx::family_from_name("pyramid"), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  for (fx::Family f : fx::kAllFamilies) {
    const IbrepFile a = fx::make(f, 77, 3);
    const IbrepFile b = fx::make(f, 77, 3);
    CHECK(a.brep == b.brep);
    const IbrepFile c = fx::make(f, 78, 3);
    const IbrepFile d = fx::make(f, 77, 4);
    CHECK((a.brep == c.brep) == false);
    CHECK((a.brep == d.brep) == false);
  }
}

TEST_CASE("fixtures are canonical and structurally clean") {
  for (fx::Family f : fx::kAllFamilies) {
    for (int i = 0; i < 10; ++i) {
      const IbrepFile file = fx::make(f, 31, i);
      CHECK(structural_check(file.brep).empty());
      CHECK(canonicalize(file.brep) == file.brep);
    }
    CHECK(structural_check(fx::canonical(f).brep).empty());
  }
}

TEST_CASE("fixtures reconstruct into valid closed solids") {
  for (fx::Family f : fx::kAllFamilies) {
    for (int i = 0; i < 8; ++i) {
      const IbrepFile file = fx::make(f, 9, i);
      const SolidModel m = reconstruct(file.brep, file.grid);
      CHECK(m.report.all_ok());
      CHECK(m.report.closed_solid);
    }
  }
}

TEST_CASE("canonical fixtures expose their surface families") {
  const Tolerances tol;

  auto surfaces_of = [&](fx::Family f) {
    const IbrepFile file = fx::canonical(f);
    const SolidModel m = reconstruct(file.brep, file.grid);
    REQUIRE(m.report.all_ok());
    std::map<std::string, int> counts;
    for (const FaceRecon& fc : m.faces) {
      REQUIRE(fc.ok);
      ++counts[surface_type_name(*fc.surface)];
    }
    return std::make_pair(m, counts);
  };

  SUBCASE("box is all planes") {
    auto [m, counts] = surfaces_of(fx::Family::Box);
    CHECK(counts["plane"] == 6);
  }

  SUBCASE("pocketed box is all planes with an inner wire") {
    auto [m, counts] = surfaces_of(fx::Family::Pocket);
    CHECK(counts["plane"] == 11);
    int two_wires = 0;
    for (const FaceRecon& fc : m.faces) two_wires += fc.wires.size() == 2;
    CHECK(two_wires == 1);
  }

  SUBCASE("fillet prism carries one cylinder") {
    auto [m, counts] = surfaces_of(fx::Family::Fillet);
    CHECK(counts["cylinder"] == 1);
    CHECK(counts["plane"] == 6);
    for (const FaceRecon& fc : m.faces) {
      if (!std::holds_alternative<Cylinder>(*fc.surface)) continue;
      for (const Vec3& p : fc.mesh.positions)
        CHECK(surface_distance(*fc.surface, p) <= tol.geom_eps);
    }
  }

  SUBCASE("half cone carries one cone") {
    auto [m, counts] = surfaces_of(fx::Family::Cone);
    CHECK(counts["cone"] == 1);
    CHECK(counts["plane"] == 3);
  }

  SUBCASE("octant carries one sphere") {
    auto [m, counts] = surfaces_of(fx::Family::Sphere);
    CHECK(counts["sphere"] == 1);
    CHECK(counts["plane"] == 3);
    for (const FaceRecon& fc : m.faces) {
      if (!std::holds_alternative<Sphere>(*fc.surface)) continue;
      for (const Vec3& p : fc.mesh.positions)
        CHECK(surface_distance(*fc.surface, p) <= tol.geom_eps);
    }
  }

  SUBCASE("ring is four torus patches") {
    auto [m, counts] = surfaces_of(fx::Family::Torus);
    CHECK(counts["torus"] == 4);
    const IbrepFile file = fx::canonical(fx::Family::Torus);
    for (const FaceRecon& fc : m.faces) {
      const Torus& t = std::get<Torus>(*fc.surface);
      CHECK(t.major_radius == doctest::Approx(18.0 / 64).epsilon(1e-9));
      CHECK(t.minor_radius == doctest::Approx(8.0 / 64).epsilon(1e-9));
    }
  }
}

TEST_CASE("plane faces sit within the plane tolerance") {
  const Tolerances tol;
  const IbrepFile file = fx::canonical(fx::Family::Box);
  const SolidModel m = reconstruct(file.brep, file.grid);
  for (const FaceRecon& fc : m.faces) {
    const Plane& pl = std::get<Plane>(*fc.surface);
    for (const Vec3& p : fc.mesh.positions)
      CHECK(std::abs(pl.normal.dot(p) - pl.offset) <= tol.geom_eps);
  }
}

TEST_CASE("parameter sweeps vary the geometry") {
  std::set<std::string> hashes;
  for (int i = 0; i < 30; ++i)
    hashes.insert(content_hash(fx::make(fx::Family::Box, 4, i).brep).combined());
  CHECK(hashes.size() >= 28);  // collisions in a sweep are rare
}

TEST_CASE("corpus covers every family") {
  const auto corpus = fx::corpus(12, 3);
  CHECK(corpus.size() == 18);
  for (const IbrepFile& f : corpus) CHECK(structural_check(f.brep).empty());
}
