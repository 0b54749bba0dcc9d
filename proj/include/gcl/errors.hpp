#pragma once

#include <stdexcept>
#include <string>

namespace gcl {

/// Raised when a caller breaks an operation's precondition (bad dimension,
/// non-positive factor, malformed matrix, ...).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The requested operation has no implementation for this body variant,
/// e.g. a support function of a polytope.
class UnsupportedError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A check refused to run because a body is not inside the required ball.
class ContainmentError : public ContractViolation {
  public:
    ContainmentError(const std::string& what, double radius, double limit)
        : ContractViolation(what), radius_(radius), limit_(limit)
    {
    }
    double radius() const noexcept { return radius_; }
    double limit() const noexcept { return limit_; }

  private:
    double radius_;
    double limit_;
};

/// A numerical routine could not reach its accuracy target; carries the
/// best value it produced.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& what, double best_value, double error_bound)
        : std::runtime_error(what), best_value_(best_value), error_bound_(error_bound)
    {
    }
    double best_value() const noexcept { return best_value_; }
    double error_bound() const noexcept { return error_bound_; }

  private:
    double best_value_;
    double error_bound_;
};

/// Input files that fail to parse. The message names the file, line and key.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace gcl
