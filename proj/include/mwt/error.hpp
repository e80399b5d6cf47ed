#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace mwt {

/// Invalid input: the message names the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Geometric request outside what the truncated domain supports
/// (ancestor above the root, misaligned cube, missing shifted cover).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force work estimate above the configured budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked inequality or structural invariant failed. `detail` carries the
/// realized values so a caller can write a falsification certificate.
class VerificationFailure : public std::runtime_error {
 public:
  VerificationFailure(const std::string& message, nlohmann::json detail = {})
      : std::runtime_error(message), detail_(std::move(detail)) {}
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  nlohmann::json detail_;
};

}  // namespace mwt
