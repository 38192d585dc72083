#pragma once

#include <stdexcept>
#include <string>

namespace lgt {

// Bad user input: geometry, couplings, sector, config files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical routine failed to reach its target.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lgt
