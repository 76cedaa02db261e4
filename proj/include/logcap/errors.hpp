#pragma once

#include <stdexcept>
#include <string>

namespace logcap {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Level construction with n * length >= 1, or two levels that share points.
class DisjointnessViolation : public Error {
 public:
  using Error::Error;
};

// Conditioning on a set of zero measure.
class ZeroMassError : public Error {
 public:
  using Error::Error;
};

// Custom radius schedule queried outside its table.
class LookupError : public Error {
 public:
  using Error::Error;
};

// An evaluation policy that cannot be applied to the given geometry.
class PolicyError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Exact kernel evaluation requested outside its supported dynamic range.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// A geometric result that has no faithful representation (e.g. a sub-ulp
// piece straddling an endpoint without exact endpoints).
class RepresentationError : public Error {
 public:
  using Error::Error;
};

class InvalidCutoff : public Error {
 public:
  using Error::Error;
};

// Caller-side precondition of a bound or schedule generator.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A computed identity that the construction guarantees came out false.
class ClaimViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace logcap
