#pragma once

#include <stdexcept>
#include <string>

namespace eqdisc {

// Bad user input: unknown system name, invalid flag values, malformed files.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Failure inside a fitting pipeline: solver divergence, integration blow-up,
// empty grown library, rank-deficient refit, ...
struct pipeline_error : std::runtime_error {
    explicit pipeline_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eqdisc
