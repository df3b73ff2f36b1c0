#pragma once

#include <stdexcept>
#include <string>

namespace schrodlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument shapes that do not match (point length vs. n, grid sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

// A numerical precondition was not met; the message names it.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace schrodlab
