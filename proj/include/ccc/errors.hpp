#pragma once

#include <stdexcept>
#include <string>

namespace ccc {

/// Invalid or inconsistent run configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested scales/windows exceed what the machine can hold (CLI exit code 2).
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Too few replicas for the requested statistical estimate (CLI exit code 3).
struct StatFloorError : std::runtime_error {
    explicit StatFloorError(const std::string& what) : std::runtime_error(what) {}
};

/// A finite window cannot decide the requested quantity; callers that cannot
/// report indeterminacy in-band throw this instead of guessing.
struct BoundaryUndetermined : std::runtime_error {
    explicit BoundaryUndetermined(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccc
