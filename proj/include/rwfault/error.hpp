#pragma once

#include <stdexcept>
#include <string>

namespace rwfault {

enum class ErrorKind {
    Parse = 1,
    Validation = 2,
    Divergence = 3,
    Io = 4,
    Argument = 5,
};

/// Base of every error thrown by the library. `kind()` is stable and maps
/// one-to-one onto the status codes of the C API.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

/// Raised when a configuration value violates an invariant. `field()` is the
/// dotted path of the offending entry, e.g. "gains.gamma".
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(ErrorKind::Validation, field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DivergenceError : public Error {
public:
    DivergenceError(double time, double state_norm, const std::string& what)
        : Error(ErrorKind::Divergence, what), time_(time), state_norm_(state_norm) {}
    double time() const noexcept { return time_; }
    double state_norm() const noexcept { return state_norm_; }

private:
    double time_;
    double state_norm_;
};

class IoError : public Error {
public:
    IoError(std::string path, const std::string& what)
        : Error(ErrorKind::Io, path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace rwfault
