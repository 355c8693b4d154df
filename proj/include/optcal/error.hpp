#pragma once

#include <stdexcept>
#include <string>

namespace optcal {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Cholesky pivot was <= 0 (insufficient jitter or a genuinely indefinite matrix).
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// tr(I - A(lambda)) collapsed to zero: lambda is too small for GCV.
class DegenerateTrace : public Error {
 public:
  using Error::Error;
};

/// Every candidate in a lambda grid failed.
class AllDegenerate : public Error {
 public:
  using Error::Error;
};

class ObjectiveNonFinite : public Error {
 public:
  using Error::Error;
};

class RankDeficientBasis : public Error {
 public:
  using Error::Error;
};

/// Operation needs the physical truth, but the system only ships a computer model.
class NoTruthAvailable : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace optcal
