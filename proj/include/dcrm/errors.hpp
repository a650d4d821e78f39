#pragma once

#include <stdexcept>
#include <string>

namespace dcrm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or field extents that do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (non-finite loss or gradient) during optimization.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Problems reading or writing binary containers.
class FormatError : public Error {
 public:
  enum class Kind { kBadMagic, kHeaderMismatch, kTruncatedPayload, kIo };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace dcrm
