#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "holodyn/mvps.hpp"
#include "holodyn/smalldiv.hpp"
#include "holodyn/spectrum.hpp"

namespace holodyn {

using Json = nlohmann::json;

// {"dim", "trunc", "components": [[{"alpha", "re", "im"}, ...], ...]} with an
// optional "exact_angles": [[p, q] | null, ...].
Json germ_to_json(const TruncatedGerm& f);
TruncatedGerm germ_from_json(const Json& j);
TruncatedGerm read_germ(const std::filesystem::path& path);

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j);

// {"values": [{"re","im"}...], "exact_angles": [...], "defective"}.
Json multipliers_to_json(const MultiplierTuple& m);
MultiplierTuple multipliers_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);

// Keys sorted, floats at 17 significant digits, two-space indent; non-finite
// floats become the strings "inf", "-inf", "nan".
std::string canonical_dump(const Json& j);

// "p/q" or "p".
Angle parse_angle(std::string_view s);
// "1.5", "-2i", "0.1-0.3i", "i".
cplx parse_complex(std::string_view s);
// "p/q" divides in double-double; decimals keep the long double residual.
DoubleDouble parse_theta(std::string_view s);

}  // namespace holodyn
