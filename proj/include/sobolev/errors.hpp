#pragma once

#include <stdexcept>
#include <string>

namespace sobolev {

/// Base class for failures of the interpolation machinery on valid-looking input.
class InterpolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two interpolation points coincide within the distinctness tolerance.
class DuplicatePointsError : public InterpolationError {
 public:
  using InterpolationError::InterpolationError;
};

/// The points do not determine a unique least-norm interpolant.
class NotPoisedError : public InterpolationError {
 public:
  using InterpolationError::InterpolationError;
};

/// Overdetermined data admits no quadratic interpolant.
class InconsistentError : public InterpolationError {
 public:
  using InterpolationError::InterpolationError;
};

/// No replacement keeps the interpolation system nonsingular.
class GeometryFailure : public InterpolationError {
 public:
  using InterpolationError::InterpolationError;
};

}  // namespace sobolev
