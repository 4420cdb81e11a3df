// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ANSSEL_ERROR_H_
#define ANSSEL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anssel {

// Root of every error the library throws. The CLI maps the concrete class to
// an exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf, non-finite loss or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad input values: labels, ids out of range, empty datasets, overlapping
// spans.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed text files (vocab, gazetteer, dataset TSV, config).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Checkpoint I/O. Each failure mode has its own subclass.
class SerializationError : public Error {
 public:
  using Error::Error;
};
class MagicError : public SerializationError {
 public:
  using SerializationError::SerializationError;
};
class VersionError : public SerializationError {
 public:
  using SerializationError::SerializationError;
};
class ShapeMismatchError : public SerializationError {
 public:
  using SerializationError::SerializationError;
};
class ByteCountError : public SerializationError {
 public:
  using SerializationError::SerializationError;
};
class TruncationError : public SerializationError {
 public:
  TruncationError(const std::string& what, std::string tensor)
      : SerializationError(what), tensor_(std::move(tensor)) {}
  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

// Process exit codes: 0 ok, 1 usage, 2 data/format, 3 numeric.
enum class ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

ExitCode exit_code(const Error& e);

}  // namespace anssel

#endif  // ANSSEL_ERROR_H_
