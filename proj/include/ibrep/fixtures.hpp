#pragma once

#include "ibrep/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ibrep::fixtures {

/// Procedural solid families. Every fixture is authored directly on the
/// quantization lattice (6-bit by default, unit-cube bbox), so round trips
/// are exact and the analytic surfaces fit their boundary curves to
/// floating-point precision.
enum class Family { Box, Pocket, Fillet, Cone, Sphere, Torus };

inline constexpr Family kAllFamilies[] = {Family::Box,  Family::Pocket,
                                          Family::Fillet, Family::Cone,
                                          Family::Sphere, Family::Torus};

const char* family_name(Family f);
Family family_from_name(const std::string& name);  // throws on unknown

/// Deterministic parameter sweep: fixture `index` of a family under `seed`.
/// Models are canonical and structurally valid by construction.
IbrepFile make(Family family, std::uint64_t seed, int index, int bits = 6);

/// Fixed representative of each family, used wherever a single exemplar of
/// a surface type is needed.
IbrepFile canonical(Family family, int bits = 6);

/// Convenience: `count` fixtures of every family under one seed.
std::vector<IbrepFile> corpus(std::uint64_t seed, int count_per_family,
                              int bits = 6);

}  // namespace ibrep::fixtures
