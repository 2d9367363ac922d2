#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FileKind { gaze, input, hrm, demo, meta, zones, profile };

const char* to_string(FileKind kind);

class ParseError : public Error {
public:
    ParseError(FileKind kind, std::size_t line, std::size_t byte_offset, const std::string& message,
               const std::string& source = {});

    /// Same error, reported against a concrete file path.
    ParseError with_source(const std::string& source) const {
        return ParseError(kind_, line_, byte_offset_, detail_, source);
    }

    FileKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t byte_offset() const noexcept { return byte_offset_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& source() const noexcept { return source_; }

private:
    FileKind kind_;
    std::size_t line_;
    std::size_t byte_offset_;
    std::string detail_;
    std::string source_;
};

class UnknownPlayer : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class EmptySupport : public Error {
public:
    using Error::Error;
};

/// Too few distinct points for the requested clustering.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Zero spread or zero covariance where a positive one is required.
class DegenerateData : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidProfile : public Error {
public:
    using Error::Error;
};

}  // namespace etk
