#pragma once

#include <stdexcept>
#include <string>

namespace mic {

// Invalid record field or bad argument. Maps to CLI exit code 2.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Solver could not produce a trustworthy number. Maps to CLI exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
}

inline void require_domain(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error(what);
}

} // namespace mic
