#pragma once

#include <stdexcept>
#include <string>

namespace msplace {

/// Root of every error raised by the library. The CLI maps each leaf
/// category to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, inconsistent shapes, out-of-range indices.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class LayoutError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Query time outside the span of a GPS track.
class ExtrapolationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A weight matrix that carries no information (all blocks zero).
class DegenerateModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Model file incompatible with the data it is applied to.
class ModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Missing, unpaired or malformed dataset files.
class IngestionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public SolverError {
 public:
  using SolverError::SolverError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace msplace
