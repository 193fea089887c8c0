#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Invalid problem data: grid/exponent/coupling combinations that violate the
// model assumptions (|Omega| > 1, growth regime, schedule shape, bad config).
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Neumann solve requested for a right-hand side with nonzero total integral.
struct IncompatibleRhs : std::runtime_error {
    explicit IncompatibleRhs(const std::string& msg) : std::runtime_error(msg) {}
};

// An inner iterative process (scalar root find, CG) hit its iteration cap.
struct NoConvergence : std::runtime_error {
    NoConvergence(const std::string& what_failed, int iterations)
        : std::runtime_error(what_failed + " did not converge after " +
                             std::to_string(iterations) + " iterations"),
          iterations(iterations) {}
    int iterations;
};

// Point outside the domain of the congestion cost (m < 0, or m = 0 with w != 0).
struct InfeasiblePoint : std::runtime_error {
    explicit InfeasiblePoint(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mfg
