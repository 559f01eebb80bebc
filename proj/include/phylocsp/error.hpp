#pragma once

#include <stdexcept>
#include <string>

namespace phylo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based line/column when known.
class ParseError : public Error {
public:
    ParseError(const std::string & what, int line = 0, int column = 0);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// A configured enumeration bound (leaves, arity, domain size) was exceeded.
class BoundError : public Error {
public:
    using Error::Error;
};

}  // namespace phylo
