#pragma once

#include <stdexcept>
#include <string>

namespace mlnec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexical or syntactic problem in a KB, narrative or annotation file.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

  /// The same error with the file name in front of line:column.
  ParseError in_file(const std::string& path) const { return ParseError(path + ":" + what(), line_, column_, 0); }

 private:
  ParseError(const std::string& full, int line, int column, int) : Error(full), line_(line), column_(column) {}

  int line_;
  int column_;
};

/// Run f, naming `path` in any ParseError it throws.
template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw e.in_file(path);
  }
}

/// Undeclared symbol, arity mismatch or sort mismatch.
class SortError : public Error {
 public:
  using Error::Error;
};

/// Construct outside the supported fragment (existentials, malformed rule heads).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Hard constraints cannot be satisfied (by the evidence or jointly).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A problem is too large for the requested exact algorithm.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown during learning or inference.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlnec
