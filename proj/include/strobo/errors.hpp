#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace strobo {

/// Shape, order or index mismatch between algebra objects or tables.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed system document or expression.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, unknown_identifier, arity, eps_power, period, schema, division };

  ParseError(Kind kind, std::string context, std::size_t line, std::size_t column,
             const std::string& message)
      : std::runtime_error(format(context, line, column, message)),
        kind_(kind),
        context_(std::move(context)),
        line_(line),
        column_(column) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& context() const noexcept { return context_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& context, std::size_t line, std::size_t column,
                            const std::string& message) {
    std::string out;
    if (!context.empty()) out += context + ": ";
    out += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    return out;
  }

  Kind kind_;
  std::string context_;
  std::size_t line_;
  std::size_t column_;
};

/// Raised when evaluating an expression fails at run time (e.g. division by a zero constant).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state encountered while integrating; carries the failing step.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(std::size_t step)
      : std::runtime_error("non-finite state at integration step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class OrbitError : public std::runtime_error {
 public:
  enum class Kind { degenerate_zero, no_convergence };

  OrbitError(Kind kind, std::vector<double> residual_trace, const std::string& message)
      : std::runtime_error(message), kind_(kind), trace_(std::move(residual_trace)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& residual_trace() const noexcept { return trace_; }

  static const char* kind_name(Kind k) {
    return k == Kind::degenerate_zero ? "degenerate-zero" : "no-convergence";
  }

 private:
  Kind kind_;
  std::vector<double> trace_;
};

}  // namespace strobo
