#include "onlineid/errors.hpp"

#include <utility>

namespace onlineid {

SolverError::SolverError(const std::string& what, double condition_estimate)
    : std::runtime_error(what), condition_estimate_(condition_estimate) {}

ConfigError::ConfigError(std::string field, const std::string& what)
    : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

}  // namespace onlineid
