#ifndef PRIOSIM_ERRORS_HPP_
#define PRIOSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace priosim {

// Bad configuration or usage (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A module contract was violated at run time (CLI exit code 2).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace priosim

#endif  // PRIOSIM_ERRORS_HPP_
