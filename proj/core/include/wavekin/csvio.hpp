#pragma once

#include <cstdio>
#include <string>

namespace wavekin {

/// 17 significant digits: strtod of the output reproduces the double exactly,
/// which is what makes rerun/analyze outputs byte-identical.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace wavekin
