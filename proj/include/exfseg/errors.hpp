#pragma once

#include <stdexcept>
#include <string>

namespace exfseg {

/// Feature value outside the support of the distribution.
struct SupportError : std::domain_error {
    explicit SupportError(const std::string& msg) : std::domain_error(msg) {}
};

/// Natural parameter outside the open natural parameter space.
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Region statistics too degenerate to invert (zero variance / zero mean).
struct DegenerateRegionError : std::runtime_error {
    explicit DegenerateRegionError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace exfseg
