#include "branchhist/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace branchhist {

std::string format_real(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    std::string out(buf.data(), res.ptr);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

std::string format_canonical(double x) {
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

}  // namespace branchhist
