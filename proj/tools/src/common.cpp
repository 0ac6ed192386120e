#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace tippingscope::cli {

double parse_number(const std::string& token, const std::string& what)
{
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw UsageError(what + ": expected a number, got '" + token + "'");
    return v;
}

std::pair<double, double> parse_pair(const std::string& token, const std::string& what)
{
    const auto comma = token.find(',');
    if (comma == std::string::npos)
        throw UsageError(what + ": expected 'a,b', got '" + token + "'");
    return {parse_number(token.substr(0, comma), what),
            parse_number(token.substr(comma + 1), what)};
}

std::pair<int, int> parse_grid(const std::string& token, const std::string& what)
{
    const auto x = token.find_first_of("xX");
    if (x == std::string::npos)
        throw UsageError(what + ": expected 'NxM', got '" + token + "'");
    const std::string a = token.substr(0, x), b = token.substr(x + 1);
    const double da = parse_number(a, what), db = parse_number(b, what);
    const int na = static_cast<int>(da), nb = static_cast<int>(db);
    if (na != da || nb != db || na < 1 || nb < 1)
        throw UsageError(what + ": grid sides must be positive integers, got '" + token + "'");
    return {na, nb};
}

void write_text(const std::string& path, const std::string& text)
{
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace tippingscope::cli
