#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace handuse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input the caller supplied is malformed or violates a documented invariant.
/// The CLI maps every subclass to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, std::string detail)
        : InputError("line " + std::to_string(line) + ": " + detail), line_(line), detail_(std::move(detail)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

class ValidationError : public InputError {
public:
    ValidationError(std::string field, std::string detail)
        : InputError("invalid field '" + field + "': " + detail), field_(std::move(field)), detail_(std::move(detail)) {}
    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class ArgumentError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Every paired difference was zero; no test statistic exists.
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

/// Training data for a fold contains the held-out participant.
class SplitIntegrityError : public Error {
public:
    using Error::Error;
};

/// Methods were scored on different annotated frame sets.
class ProtocolError : public Error {
public:
    using Error::Error;
};

}  // namespace handuse
