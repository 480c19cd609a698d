#pragma once

#include <stdexcept>
#include <string>

namespace madelab {

// Bad parameters, inconsistent configuration, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Runtime numerical failure (NaN, blow-up, caustic past validity, ...).
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File/serialization failure. The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace madelab
