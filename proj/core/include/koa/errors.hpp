#pragma once

#include <stdexcept>
#include <string>

namespace koa {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor shape / axis mismatch. Messages name the offending axis.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// API misuse (non-scalar backward, double backward, missing layer, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (ratios, weights, smoothing, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset-level problems (empty grade, too few samples, unknown id, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (NaN loss, non-finite ingestion).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / encoding failures; message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace koa
