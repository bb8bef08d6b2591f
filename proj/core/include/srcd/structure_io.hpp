#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "srcd/liealg.hpp"

namespace srcd {

// JSON structure files:
//   {"name": str, "n": int, "nu": int,
//    "brackets": [{"i": 0, "j": 1, "coeffs": {"2": 1.0}}, ...],   i < j only
//    "gram_h": [n*n row-major], "gram_v": [nu*nu row-major],
//    "matrix_realization": {"dim": d, "field": "real"|"complex",
//                           "generators": [[d*d row-major], ...]}}      optional
// Complex generator entries are [re, im] pairs. Unknown keys are rejected.
// Throws ParseError, SchemaError or ValidationError.
LieSRStructure parse_structure_text(std::string_view text);
LieSRStructure parse_structure_file(const std::filesystem::path& path);

std::string serialize_structure(const LieSRStructure& s);

}  // namespace srcd
