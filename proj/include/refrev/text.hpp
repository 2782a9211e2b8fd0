#pragma once

#include <string>

namespace refrev {

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

} // namespace refrev
