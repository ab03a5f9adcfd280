#pragma once

#include <stdexcept>
#include <string>

namespace lrd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, indices or parameter ranges was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (negative weights, wrong list lengths, ...).
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its content is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A linear solve or objective evaluation produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrd
