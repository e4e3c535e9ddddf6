#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subloc {

// Base class for every error raised by the library. Callers that only need a
// one-line diagnostic can catch this and print what().
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number it was found on.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace subloc
