#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace qft {

inline constexpr int kSignificantDigits = 12;

// Shortest "%.12g" rendering; non-finite values become "inf", "-inf", "nan".
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
    return buf;
}

}  // namespace qft
