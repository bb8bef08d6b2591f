#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace srcd::cli {

using Json = nlohmann::ordered_json;

// Finite values become numbers; infinities and NaN become the strings
// "inf", "-inf", "nan".
Json num(double v);
// nullopt becomes the given sentinel string
Json num(const std::optional<double>& v, const char* sentinel);
Json matrix(const Eigen::MatrixXd& m);
Json vector(const Eigen::VectorXd& v);

// Canonical rendering: insertion-ordered keys, two-space indent, doubles
// with 17 significant digits. Byte-identical for identical input.
std::string dump_canonical(const Json& j);

// Indented "key: value" rendering for --text.
std::string dump_text(const Json& j);

}  // namespace srcd::cli
