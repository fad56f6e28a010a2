#pragma once

#include <stdexcept>
#include <string>

namespace txlr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or extents that do not agree (kernel larger than k-space, refold of a
/// wrongly sized matrix, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A LAPACK / FFT routine reported failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range algorithm parameter (e.g. unreachable acceleration factor).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Noise statistics could not be estimated from the supplied samples.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// The ADMM data-consistency residual blew up.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised by metrics whose normalisation is undefined (zero ground truth,
/// empty support).
class MetricError : public Error {
 public:
  using Error::Error;
};

// KTEN file errors. Each failure mode has its own type so callers can tell a
// foreign file from a damaged one.
class FormatError : public Error {
 public:
  using Error::Error;
};
class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};
class UnknownDtypeError : public FormatError {
 public:
  using FormatError::FormatError;
};
class LengthMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace txlr
