#pragma once

#include <stdexcept>
#include <string>

namespace geoentropy {

/// Invalid arguments or violated preconditions of a library call.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A size guard was hit: point budget, enumeration budget, exact-count guard.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration failed validation. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  /// Keeps the field of `e` and prefixes its message with a location.
  static ConfigError at(const std::string& location, const ConfigError& e) {
    return ConfigError(e.field_, location + e.what(), 0);
  }

  const std::string& field() const noexcept { return field_; }

 private:
  ConfigError(std::string field, const std::string& full, int) : std::runtime_error(full), field_(std::move(field)) {}

  std::string field_;
};

}  // namespace geoentropy
