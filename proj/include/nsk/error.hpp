#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsk {

enum class ErrorKind {
    parameter,
    constitutive,
    root_finding,
    hyperbolicity,
    structural,
    not_coupled,
    not_dissipative,
    domain_violation,
    blow_up,
    grid_mismatch,
    fit,
    config,
};

std::string_view to_string(ErrorKind kind);

/// Base error for everything thrown by the library. The kind is machine
/// readable; the CLI maps it onto exit codes and report reasons.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace nsk
