#pragma once

#include <string>
#include <string_view>

namespace aircomp {

/// Shortest decimal that parses back to exactly `x`.
std::string format_double(double x);

/// Strict full-string parse; throws ValidationError naming `what`.
double parse_double_strict(std::string_view text, std::string_view what);

}  // namespace aircomp
