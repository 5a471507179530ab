// error.hpp
// Exception types shared by every module. The CLI maps ConfigError to exit
// status 1 and NumericalError to exit status 2.
#pragma once

#include <stdexcept>
#include <string>

namespace idyll {

/// Malformed input: bad config keys, out-of-range parameters, inconsistent
/// array shapes.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver a result that meets its contract
/// (non-convergence, step underflow, violated gap condition, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace idyll
