#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Arguments outside the admissible parameter range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quadrature or iteration failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation is not available for the given coupling (e.g. a < 0 time stepping).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace hardy
