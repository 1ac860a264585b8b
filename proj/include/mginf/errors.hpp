#pragma once

#include <stdexcept>
#include <string>

namespace mginf {

// Invalid parameters or arguments outside an operation's domain. CLI exit code 2.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation not supported by the given model (e.g. hazard of a law without a
// density). CLI exit code 2.
class capability_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Mismatched grids or incompatible array shapes. CLI exit code 2.
class shape_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergence, runaway horizon, overflow. CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root finding asked for on an interval whose endpoints do not bracket a sign
// change.
class bracket_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// A truncated series or pmf left more mass behind than the caller tolerates.
class truncation_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

}  // namespace mginf
