#pragma once

#include <charconv>
#include <string>

namespace fbgather::csv {

/// Shortest text that parses back to exactly `v`.
inline std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace fbgather::csv
