#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tfde {

/// Parameter outside the admissible range (orders, tempering, sizes).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SizeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A direct solve hit a zero pivot or a vanishing eigenvalue.
class SingularError : public std::runtime_error {
public:
    SingularError(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// An iterative method failed: breakdown, divergence or iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_size(std::size_t got, std::size_t expected, const char* what) {
    if (got != expected) {
        throw SizeMismatch(std::string(what) + ": expected size " + std::to_string(expected) +
                           ", got " + std::to_string(got));
    }
}

}  // namespace tfde
