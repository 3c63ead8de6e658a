#pragma once

#include <stdexcept>
#include <string>

namespace ctw {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input (configuration, model invariants).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A computation that could not reach its target (non-convergence, small divisor,
// non-finite intermediate).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ctw
