#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brainschema {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An invalid schema configuration. `field()` names the offending parameter.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A neuron index or address outside the configured neuron space.
class AddressError : public Error {
 public:
  AddressError(std::string level, const std::string& message)
      : Error(level + ": " + message), level_(std::move(level)) {}
  const std::string& level() const noexcept { return level_; }

 private:
  std::string level_;
};

/// A label that does not match the grammar or the config bounds.
/// `component()` is the 1-based path position that failed (0 for whole-text errors).
class ParseError : public Error {
 public:
  ParseError(std::size_t component, const std::string& message)
      : Error("component " + std::to_string(component) + ": " + message),
        component_(component) {}
  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

/// A malformed line in a text file (triples, config, CSV). `line()` is 1-based.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

/// I/O or format failure inside a store backend. The message names the failing operation.
class StoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace brainschema
