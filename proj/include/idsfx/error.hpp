#pragma once

#include <stdexcept>
#include <string>

namespace idsfx {

// Base of every error the library throws. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad caller input: out-of-range ratios, invalid ranks, bad config values.
class ArgumentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class EmptyDatasetError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// Wrong cell count, unparsable numeric cell.
class ParseError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    DecodeError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Values outside the mathematical domain of an operation (negative input to
// NMF / chi-square, NaN fed to a classifier).
class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

// Stage failure inside the composed pipeline. The message is prefixed with
// the stage name.
class PipelineError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace idsfx
