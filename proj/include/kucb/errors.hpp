#ifndef KUCB_ERRORS_HPP
#define KUCB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kucb {

// Bad parameter values in a kernel/radius/experiment description.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed runtime inputs (dimension mismatches, non-finite data, ...).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: failed Cholesky pivot, negative quadratic form
// beyond roundoff tolerance, singular solve.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Operation not available for the given kernel family (e.g. explicit
// feature coordinates requested from a kernel without a finite-rank map).
class UnsupportedOperationError : public std::runtime_error {
public:
    explicit UnsupportedOperationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kucb

#endif
