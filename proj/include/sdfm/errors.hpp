#pragma once

#include <stdexcept>
#include <string>

namespace sdfm {

// All library errors derive from Error so callers can catch one base type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct DuplicateAtoms : Error {
    explicit DuplicateAtoms(const std::string& msg) : Error(msg) {}
};

struct InvalidTime : Error {
    explicit InvalidTime(const std::string& msg) : Error(msg) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg) : Error(msg) {}
};

struct StepLimitExceeded : Error {
    explicit StepLimitExceeded(const std::string& msg) : Error(msg) {}
};

struct NonOrthogonal : Error {
    explicit NonOrthogonal(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace sdfm
