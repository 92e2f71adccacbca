#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A row of a window document could not be read.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant (ordering, ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters, recipes or topologies.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Arguments outside an operation's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class SensorUnavailableError : public Error {
public:
    SensorUnavailableError(std::string sensor, std::string stage = {});
    const std::string& sensor() const noexcept { return sensor_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string sensor_;
    std::string stage_;
};

/// No accelerometer: the device cannot run any sensor combination.
class UnsupportedDeviceError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, double loss);
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Model or bundle documents that cannot be restored.
class LoadError : public Error {
public:
    using Error::Error;
};

}  // namespace adl
