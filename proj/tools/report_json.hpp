#pragma once

#include <cstddef>
#include <vector>

#include "holodyn/blowup.hpp"
#include "holodyn/dynlab.hpp"
#include "holodyn/io.hpp"
#include "holodyn/normalform.hpp"
#include "holodyn/parabolic.hpp"
#include "holodyn/smalldiv.hpp"
#include "holodyn/spectrum.hpp"

// JSON views of library results. Component and coordinate indices are
// 1-based on this side, matching the command-line flags.
namespace holodyn::cli {

Json slots_to_json(const std::vector<Slot>& slots);
Json normalization_to_json(const NormalizationResult& r);
Json resonance_table_to_json(const ResonanceTable& t);
Json classifications_to_json(const MultiplierTuple& m);
Json brjuno_to_json(const BrjunoReport& r);
Json continued_fraction_to_json(const ContinuedFraction& cf);
Json chardir_to_json(const CharacteristicReport& r);
Json orbit_to_json(const OrbitRecord& r, bool with_points);
Json vector_to_json(const std::vector<cplx>& v);

}  // namespace holodyn::cli
