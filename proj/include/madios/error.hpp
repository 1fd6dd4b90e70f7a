#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace madios {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class EmptyCorpusError : public Error {
public:
    using Error::Error;
};

// Bad argument to an operation (out-of-range position, empty input, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Data that parsed but violates an invariant (overlapping spans, unknown ids).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    explicit ParseError(const std::string& what) : ParseError(what, 0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RewireError : public Error {
public:
    using Error::Error;
};

class EmptyClassError : public Error {
public:
    using Error::Error;
};

// A grammar body references a non-terminal that has no rule.
class ClosureError : public Error {
public:
    using Error::Error;
};

}  // namespace madios
