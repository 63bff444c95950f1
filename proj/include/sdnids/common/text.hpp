#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace sdnids {

inline std::string strprintf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    va_list ap2;
    va_copy(ap2, ap);
    const int n = std::vsnprintf(nullptr, 0, fmt, ap);
    va_end(ap);
    std::string out(static_cast<std::size_t>(n), '\0');
    std::vsnprintf(out.data(), out.size() + 1, fmt, ap2);
    va_end(ap2);
    return out;
}

// Round-trippable decimal text for a double.
inline std::string to_text(double v) { return strprintf("%.17g", v); }

// Fixed-precision text; used for CSV cells so reruns are byte-identical.
inline std::string fixed_text(double v, int prec) { return strprintf("%.*f", prec, v); }

}  // namespace sdnids
