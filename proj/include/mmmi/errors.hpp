#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mmmi {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model specification or scenario configuration.
class SpecError : public Error {
 public:
  using Error::Error;
};

// A covariance block required to be nonsingular is singular, e.g. a
// zero-variance theta or an all-zero modality marginal.
class DegenerateBlockError : public Error {
 public:
  DegenerateBlockError(std::string block, const std::string& what)
      : Error(what), block_(std::move(block)) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

// Closed-form evaluation requested for a model outside its setting.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

// A matrix factorization failed (input not positive definite, etc.).
class FactorizationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DigestMismatchError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace mmmi
