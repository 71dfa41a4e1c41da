#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semplan {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  syntax,
  negated_non_observation,
  unknown_observation,
  next_operator,
  unsupported_operator,
};

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ParseErrorKind kind_;
  std::size_t position_;
};

// DFA construction exceeded its state budget.
class StateLimitError : public Error {
 public:
  using Error::Error;
};

// Invalid model data: empty grids, letters outside 2^O, unnormalized beliefs.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Input file violates its schema. `pointer()` is a JSON pointer to the
// offending node.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(pointer.empty() ? what : pointer + ": " + what),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t sweeps, double residual)
      : Error("value iteration did not converge after " + std::to_string(sweeps) +
              " sweeps (residual " + std::to_string(residual) + ")"),
        sweeps_(sweeps),
        residual_(residual) {}

  std::size_t sweeps() const noexcept { return sweeps_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t sweeps_;
  double residual_;
};

// A size limit of an exact/oracle routine was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The executor reached a state where the policy prescribes nothing.
class PolicyError : public Error {
 public:
  using Error::Error;
};

}  // namespace semplan
