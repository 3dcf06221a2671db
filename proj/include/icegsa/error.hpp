#pragma once

#include <stdexcept>
#include <string>

namespace icegsa {

/// Broad failure categories. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  dimension,
  input,
  parameter,
  config,
  ingestion,
  fit,
  degenerate_variance,
  compute,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::dimension, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what) : Error(ErrorKind::ingestion, what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error(ErrorKind::fit, what) {}
};

class DegenerateVarianceError : public Error {
 public:
  explicit DegenerateVarianceError(const std::string& what)
      : Error(ErrorKind::degenerate_variance, what) {}
};

class ComputeError : public Error {
 public:
  explicit ComputeError(const std::string& what) : Error(ErrorKind::compute, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace icegsa
