#ifndef PSNE_ERRORS_HPP
#define PSNE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psne {

// Argument outside the mathematical domain of an operation (negative rate,
// non-positive sharpness, ...). Shape and validation problems use
// std::invalid_argument.
using DomainError = std::domain_error;

/// Non-finite embedding coordinates handed to a kernel computation.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The optimizer produced a non-finite cost or coordinate.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : std::runtime_error("diverged at iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Input labels do not support the requested metric (e.g. a single class).
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace psne

#endif
