#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groupnoise {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two values or measures from different group specs were combined.
class SpecMismatch : public Error {
public:
    using Error::Error;
};

/// Checked 64-bit integer overflow in element arithmetic.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Invalid experiment configuration or invalid input data.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An exact computation would exceed the configured atom budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::size_t step_reached, std::size_t atoms)
        : Error(what + " (step reached " + std::to_string(step_reached) + ", atoms " +
                std::to_string(atoms) + ")"),
          step_reached_(step_reached), atoms_(atoms) {}

    std::size_t step_reached() const noexcept { return step_reached_; }
    std::size_t atoms() const noexcept { return atoms_; }

private:
    std::size_t step_reached_;
    std::size_t atoms_;
};

}  // namespace groupnoise
