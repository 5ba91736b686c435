#pragma once

#include <charconv>
#include <sstream>
#include <string>
#include <vector>

namespace qpmix {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& items, const char* sep) {
    std::ostringstream out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out << sep;
        if constexpr (std::is_floating_point_v<T>)
            out << format_double(items[i]);
        else
            out << items[i];
    }
    return out.str();
}

}  // namespace qpmix
