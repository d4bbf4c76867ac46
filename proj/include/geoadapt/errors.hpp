#pragma once

#include <stdexcept>
#include <string>

namespace geoadapt {

enum class ErrorCode {
    invalid_argument,
    parse,
    io,
    numeric,
    rejected_records,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCode::invalid_argument, what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what)
        : Error(ErrorCode::parse, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what)
        : Error(ErrorCode::io, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what)
        : Error(ErrorCode::numeric, what) {}
};

}  // namespace geoadapt
