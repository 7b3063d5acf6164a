#pragma once

#include <stdexcept>
#include <string>

namespace zaremba {

/// Base class for all library failures; the CLI maps these to exit code 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GeometryError : Error {
    using Error::Error;
};
struct EllipticityError : Error {
    using Error::Error;
};
struct CapacityError : Error {
    using Error::Error;
};
struct SolverError : Error {
    using Error::Error;
};
struct ChainError : Error {
    using Error::Error;
};
struct ExperimentError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace zaremba
