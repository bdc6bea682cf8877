#pragma once

#include <stdexcept>
#include <string>

namespace tmod {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Bad CLI flags / config files / parameter combinations. CLI maps this to exit code 2.
struct config_error : error {
    explicit config_error(const std::string& what) : error(what) {}
};

// A computation could not reach the requested precision. Carries what was achieved.
struct precision_error : error {
    precision_error(const std::string& what, long long achieved, long long required)
        : error(what + " (achieved v=" + std::to_string(achieved) +
                ", required v=" + std::to_string(required) + ")"),
          achieved(achieved), required(required) {}
    long long achieved;
    long long required;
};

struct domain_error : error {
    explicit domain_error(const std::string& what) : error(what) {}
};

} // namespace tmod
