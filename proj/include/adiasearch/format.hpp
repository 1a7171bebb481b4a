#ifndef ADIASEARCH_FORMAT_HPP
#define ADIASEARCH_FORMAT_HPP

#include <cstdio>
#include <string>

namespace adiasearch {

/// Round-trip text form of a double: 17 significant digits.
inline std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

} // namespace adiasearch

#endif
