#include "ctcp/format.hpp"

#include <cmath>
#include <cstdio>

namespace ctcp {

std::string fmt(double v)
{
    if (v == 0)
        v = 0; // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace ctcp
