#pragma once

#include <stdexcept>
#include <string>

namespace tagsight {

// Bad input or configuration supplied by the caller. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed request that the data cannot satisfy. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RejectedTag : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateLabels : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UndefinedMetric : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingData : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class EmptyResult : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace tagsight
