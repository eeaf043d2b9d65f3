#pragma once

#include <stdexcept>
#include <string>

namespace heatwave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// A structurally invalid object: nonconforming mesh, bad partition, bad config value.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (point outside the mesh, time outside (0,T], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Linear solver or eigensolver failure.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace heatwave
