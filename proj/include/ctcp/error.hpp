#pragma once

#include <stdexcept>
#include <string>

namespace ctcp {

enum class ErrorKind {
    Domain,
    Convergence,
    Usage,
    Config,
    Numeric,
    Singular,
    NoCrossing,
    Undetermined,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Process exit code for a failure of this kind (0 is never returned).
int exit_code(ErrorKind kind);

const char* kind_name(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

} // namespace ctcp
