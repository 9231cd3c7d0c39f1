#pragma once

#include <stdexcept>
#include <string>

namespace gridclear {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (bad alpha,
/// index out of range, unnormalized probabilities).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration: fleet fields, scenario parameters, grids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// No dispatch satisfies the balance and capacity constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double demand, double capacity)
      : Error(what), demand_(demand), capacity_(capacity) {}

  double demand() const noexcept { return demand_; }
  double capacity() const noexcept { return capacity_; }

 private:
  double demand_;
  double capacity_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridclear
