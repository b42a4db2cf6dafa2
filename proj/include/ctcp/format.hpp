#pragma once

#include <string>

namespace ctcp {

// 12 significant digits, the precision of every number the tools print.
std::string fmt(double v);

} // namespace ctcp
