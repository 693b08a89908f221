#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mftx {

/// Raised when a SystemConfig (or any user-supplied input) breaks an invariant.
/// Carries every violation, not just the first one found.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Series truncation, quadrature or root-bracketing failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mftx
