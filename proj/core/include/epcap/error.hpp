#pragma once

#include <stdexcept>
#include <string>

namespace epcap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation that needs at least one device or sample received none.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Vector lengths that must agree do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A feasibility oracle rejected the zero request.
class ContradictionError : public Error {
 public:
  using Error::Error;
};

/// Malformed fleet CSV or profile JSON. `where()` names the line or field.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace epcap
