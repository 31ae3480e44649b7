#pragma once

#include <stdexcept>
#include <string>

namespace plaque {

// Base of everything the library throws on bad input or violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV (ragged rows, unterminated quotes).
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class AddressError : public Error {
 public:
  using Error::Error;
};

class FdParseError : public Error {
 public:
  FdParseError(const std::string& what, std::size_t line)
      : Error("fd line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The instance does not satisfy the FD set it is profiled against.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A configured size cap was exceeded; the message suggests Monte Carlo mode.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

}  // namespace plaque
