#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wyckoff {

/// Malformed or inconsistent input data (files, schemas, shapes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A data error anchored to a 1-based line of a text file.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Checkpoint written by an unsupported format version.
class VersionError : public DataError {
 public:
  using DataError::DataError;
};

/// Tensor or model dimensions that do not agree.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

/// A numeral that could not be parsed as a finite real.
class NumeralError : public DataError {
 public:
  using DataError::DataError;
};

/// Pattern width of a model disagrees with the data it is applied to.
class FeatureMismatch : public DataError {
 public:
  FeatureMismatch(std::size_t model_width, std::size_t data_width)
      : DataError("feature mismatch: model=" + std::to_string(model_width) +
                  " data=" + std::to_string(data_width)) {}
};

/// Training diverged (non-finite loss or parameters).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wyckoff
