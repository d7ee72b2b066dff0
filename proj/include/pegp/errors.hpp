#pragma once

#include <stdexcept>
#include <string>

namespace pegp {

/// Invalid argument to a numeric routine (lengthscale <= 0, delta outside (0,1), ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gram matrix could not be factorized even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string prior_id)
      : std::runtime_error(what), prior_id_(std::move(prior_id)) {}

  const std::string& prior_id() const noexcept { return prior_id_; }

 private:
  std::string prior_id_;
};

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AggregationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pegp
