#include "csv.hpp"

#include <fstream>

namespace tippingscope::cli {

namespace {

std::string strip(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// splits on the single expected comma; more or fewer commas is an error
std::pair<std::string, std::string> two_fields(const std::string& line,
                                               const std::string& where)
{
    const auto first = line.find(',');
    if (first == std::string::npos || line.find(',', first + 1) != std::string::npos)
        throw UsageError(where + ": expected exactly two comma-separated fields, got '" +
                         line + "'");
    return {strip(line.substr(0, first)), strip(line.substr(first + 1))};
}

} // namespace

std::vector<std::pair<double, double>> read_two_column_csv(
    const std::string& path, const std::string& col_a, const std::string& col_b)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read CSV file '" + path + "'");

    std::vector<std::pair<double, double>> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path + ":" + std::to_string(line_no);
        if (strip(line).empty())
            continue;
        const auto [a, b] = two_fields(line, where);
        if (!header_seen) {
            if (a != col_a || b != col_b)
                throw UsageError(where + ": expected header '" + col_a + "," + col_b +
                                 "', got '" + a + "," + b + "'");
            header_seen = true;
            continue;
        }
        rows.emplace_back(parse_number(a, where + " column " + col_a),
                          parse_number(b, where + " column " + col_b));
    }
    if (!header_seen)
        throw UsageError(path + ": empty CSV (missing header '" + col_a + "," + col_b + "')");
    return rows;
}

} // namespace tippingscope::cli
