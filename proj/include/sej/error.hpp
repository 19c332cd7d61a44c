#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

namespace sej {

// Input that violates a documented contract (bad selection, ragged grouping,
// schema violation). Maps to exit code 2 and HTTP 422.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure that did not reach its tolerance. Exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistic undefined for the given sample (n < 2, zero variance).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation rejected because of existing state (duplicate open session,
// outcome already recorded, output directory already present).
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};


// Session protocol violation (out-of-order or repeated submission). Carries
// what the protocol expected next.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& message, nlohmann::json expected)
      : std::runtime_error(message), expected_(std::move(expected)) {}
  const nlohmann::json& expected() const { return expected_; }

 private:
  nlohmann::json expected_;
};

class AuthError : public std::runtime_error {
 public:
  AuthError(const std::string& message, bool missing_token)
      : std::runtime_error(message), missing_token_(missing_token) {}
  bool missing_token() const { return missing_token_; }

 private:
  bool missing_token_;
};

}  // namespace sej
