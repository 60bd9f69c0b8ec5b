#pragma once

#include <string>

namespace chemolab {

/// Shortest-safe decimal text for a double (17 significant digits), locale
/// independent. Used by every text file the library writes.
std::string format_real(double value);

/// Parses a decimal real, accepting "inf"/"infinity". Throws ConfigError.
double parse_real(const std::string& text);

}  // namespace chemolab
