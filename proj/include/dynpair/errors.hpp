#pragma once

#include <stdexcept>
#include <string>

namespace dynpair {

// Invalid inputs: violated preconditions, degenerate objects, parse failures.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured resource guard fired (degree cap, evaluation cap, matrix size).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative numeric procedure failed to reach its tolerance. Carries the
// best value reached and an honest bound for it, so callers can degrade
// gracefully instead of losing the work.
struct ConvergenceError : std::runtime_error {
    double best_value;
    double best_error;
    ConvergenceError(const std::string& what, double value, double error)
        : std::runtime_error(what), best_value(value), best_error(error) {}
};

} // namespace dynpair
