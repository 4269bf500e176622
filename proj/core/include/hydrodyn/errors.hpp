#pragma once

#include <stdexcept>
#include <string>

namespace hydrodyn {

/// Bad configuration file or invalid run options.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed trajectory CSV (schema, numeric format, timestamp order).
class CsvError : public std::runtime_error {
 public:
  explicit CsvError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Regression matrix is rank deficient; the data does not excite the model.
class ExcitationError : public std::runtime_error {
 public:
  explicit ExcitationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training or simulation produced non-finite state.
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hydrodyn
