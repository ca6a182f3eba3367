#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prefregret {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, bad range).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A ratio objective whose denominator is zero or has the wrong sign.
class DegenerateObjective : public Error {
 public:
  using Error::Error;
};

class PlannerError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration exceeded its configured cap.
class OracleScaleError : public Error {
 public:
  using Error::Error;
};

/// Every hypothesis lost all posterior mass after a feedback record.
class RenormalizationError : public Error {
 public:
  RenormalizationError(std::size_t record_index, const std::string& what)
      : Error(what), record_index_(record_index) {}
  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration; `field` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace prefregret
