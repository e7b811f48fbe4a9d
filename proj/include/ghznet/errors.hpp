#pragma once

#include <stdexcept>
#include <string>

namespace ghznet {

/// Invalid configuration or input. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Photon budget of a Fock-space computation exceeded.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// A statistic was requested from an empty denominator or too few samples.
class StatError : public std::runtime_error {
public:
    explicit StatError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller broke a documented precondition.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

} // namespace ghznet
