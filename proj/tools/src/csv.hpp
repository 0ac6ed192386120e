#pragma once
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace tippingscope::cli {

/// Reads a two-column numeric CSV whose first line must be exactly the
/// header "col_a,col_b" (whitespace-insensitive, CRLF tolerated).  Rows are
/// returned in file order.  Throws IoError when the file cannot be opened
/// and UsageError, with the line number, for a wrong header, a wrong column
/// count, or a non-numeric field.
std::vector<std::pair<double, double>> read_two_column_csv(
    const std::string& path, const std::string& col_a, const std::string& col_b);

} // namespace tippingscope::cli
