#pragma once

#include <cmath>
#include <compare>

#include "logcap/errors.hpp"

namespace logcap {

/// A positive length stored by its natural logarithm.
///
/// Radii such as exp(-n^1.5) for n in the thousands are far below the
/// smallest double, but their logarithms are ordinary numbers. All
/// constructions in this library carry lengths in this form and only
/// exponentiate when a plain value is explicitly requested.
class LogLength {
 public:
  LogLength() = default;

  static LogLength from_log(double log_value) {
    if (!std::isfinite(log_value)) {
      throw InvalidArgument("LogLength: log value must be finite");
    }
    LogLength l;
    l.log_ = log_value;
    return l;
  }

  static LogLength from_length(double length) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw InvalidArgument("LogLength: length must be positive and finite");
    }
    return from_log(std::log(length));
  }

  double log() const { return log_; }
  // Underflows to 0 for very small lengths; use log() for arithmetic.
  double value() const { return std::exp(log_); }
  double abs_log() const { return std::fabs(log_); }

  LogLength scaled(double log_factor) const { return from_log(log_ + log_factor); }
  LogLength half() const { return from_log(log_ - M_LN2); }
  LogLength doubled() const { return from_log(log_ + M_LN2); }

  friend auto operator<=>(const LogLength&, const LogLength&) = default;

 private:
  double log_ = 0.0;
};

/// log(exp(a) + exp(b)) without overflow or underflow.
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log(exp(a) - exp(b)) for a > b.
inline double log_sub_exp(double a, double b) {
  if (!(a > b)) throw InvalidArgument("log_sub_exp: requires a > b");
  return a + std::log(-std::expm1(b - a));
}

}  // namespace logcap
