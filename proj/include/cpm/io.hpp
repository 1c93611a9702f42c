#pragma once

#include <string>
#include <string_view>

namespace cpm::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Parses the full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

}  // namespace cpm::io
