#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace memsim {

// Argument outside the mathematical domain of an operation (negative OD,
// non-positive amplitude in a log fit, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent or invalid configuration (sweeps, comb spec, memory params).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grid does not cover a feature it is asked to represent.
class UnderSpannedError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Grid too coarse for the requested structure.
class ResolutionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Physically inconsistent inputs, e.g. a deduced transfer efficiency above 1.
class InconsistentInputsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A profile without usable spectral weight or without comb structure.
class DegenerateProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientStructureError : public DegenerateProfileError {
 public:
  using DegenerateProfileError::DegenerateProfileError;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SilencedEchoError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Sequence-file error carrying the 1-based line number (0 for whole-file
// problems such as a missing scheme directive) and the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) +
                           (field.empty() ? "" : ", field '" + field + "'") +
                           ": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace memsim
