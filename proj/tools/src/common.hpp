#pragma once
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tippingscope::cli {

/// Bad flags, malformed arguments, or malformed configuration text.
/// dispatch() maps this family to exit code 64.
struct UsageError : std::runtime_error { using std::runtime_error::runtime_error; };

/// Unreadable inputs or unwritable outputs; exit code 1.
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };

/// Compact decimal formatting for CSV/SVG text (JSON goes through the
/// serializer's shortest-round-trip doubles instead).
inline std::string fmt(double v, int digits = 10)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// strtod over the whole token; throws UsageError naming `what` on junk,
/// trailing garbage, or an empty token.
double parse_number(const std::string& token, const std::string& what);

/// "a,b" -> (a, b).
std::pair<double, double> parse_pair(const std::string& token, const std::string& what);

/// "NxM" -> (N, M), both >= 1.
std::pair<int, int> parse_grid(const std::string& token, const std::string& what);

/// Writes text to a file, or to standard output when path is "-".
/// Throws IoError when the file cannot be created or written.
void write_text(const std::string& path, const std::string& text);

} // namespace tippingscope::cli
