#pragma once

#include <stdexcept>
#include <string>

namespace surfspin {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: out-of-range parameters, malformed files, unknown keys.
/// The CLI maps this family to exit status 2.
class InputError : public Error {
public:
  using Error::Error;
};

class GeometryError : public InputError {
public:
  using InputError::InputError;
};

class UnsupportedSurfaceError : public InputError {
public:
  using InputError::InputError;
};

class InvalidSiteError : public InputError {
public:
  using InputError::InputError;
};

class IncompleteTerminationError : public InputError {
public:
  using InputError::InputError;
};

/// Malformed structured-text input. Carries the 1-based line and the field name.
class ParseError : public InputError {
public:
  ParseError(int line, std::string field, const std::string& what)
      : InputError("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  int line_;
  std::string field_;
};

/// A computation could not produce a finite answer. CLI exit status 3.
class NumericalError : public Error {
public:
  using Error::Error;
};

class SingularityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace surfspin
