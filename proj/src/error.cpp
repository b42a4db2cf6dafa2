#include "ctcp/error.hpp"

namespace ctcp {

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Usage:
        return 1;
    case ErrorKind::Undetermined:
        return 3;
    default:
        return 2;
    }
}

const char* kind_name(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Singular: return "singularity error";
    case ErrorKind::NoCrossing: return "no crossing";
    case ErrorKind::Undetermined: return "undetermined";
    }
    return "error";
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace ctcp
