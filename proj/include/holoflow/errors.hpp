#pragma once

#include <stdexcept>
#include <string>

namespace holoflow {

/// Invalid configuration, malformed arguments, or a violated call precondition.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure at run time: divergence, degenerate samples, zero amplitudes.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File format or filesystem problem.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace holoflow
