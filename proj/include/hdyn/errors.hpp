#pragma once

#include <stdexcept>
#include <string>

namespace hdyn {

/// Malformed input: invalid trees, weights, Hurwitz data, mismatched shapes.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured resource bound (strata count, tuple count, N) was exceeded.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed. Never expected on valid input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace hdyn
