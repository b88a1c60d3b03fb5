#pragma once

#include <stdexcept>
#include <string>

namespace measurefit {

/// Numerical failure in a solver or density operation (non-integrable model,
/// mass loss, scheme breakdown). Mapped to exit status 2 by the CLI.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: config files, CSV files, command-line usage.
/// Mapped to exit status 1 by the CLI.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_ = 0;
};

/// Emit a non-fatal diagnostic to stderr. Safe to call from parallel regions.
void warn(const std::string& msg);

}  // namespace measurefit
