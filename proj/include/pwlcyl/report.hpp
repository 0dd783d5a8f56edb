#pragma once

// Deterministic text emission for command results.

#include "json.hpp"

#include <string>
#include <vector>

namespace pwlcyl {

using Json = nlohmann::ordered_json;

/// Two-space indented JSON in insertion order. Floating point values are
/// printed with 17 significant digits; non-finite values become null.
std::string to_json_text(const Json& j);

/// One number in the same 17-digit form.
std::string format_number(double v);

/// Comma-separated table. Cells containing separators or quotes are quoted.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

}  // namespace pwlcyl
