#pragma once

#include <stdexcept>
#include <string>

namespace mdp {

// Root-finding failed to reach its tolerance within the iteration budget.
class ConvergenceFailure : public std::runtime_error {
 public:
  explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

// Invalid experiment or CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdp
