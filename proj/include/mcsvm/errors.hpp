#ifndef MCSVM_ERRORS_HPP
#define MCSVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcsvm {

// Requested problem parameters cannot be satisfied (e.g. margin vs. noise
// scale). Carries the name of the violated constraint in what().
class InfeasibleConfigError : public std::runtime_error {
public:
    explicit InfeasibleConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric computation produced a non-finite value.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mcsvm

#endif
