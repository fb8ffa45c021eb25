#pragma once

#include <stdexcept>
#include <string>

namespace elastic {

/// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the O(N^2) oracles when the grid exceeds their cost guard.
class SizeLimit : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// The inverse transform produced a significant imaginary part.
class SymmetryViolation : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A gradient flow produced a non-finite loss or field.
class Divergence : public std::runtime_error {
  public:
    Divergence(int step, const std::string& what)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

    /// Step at which the non-finite value appeared.
    int step() const noexcept { return step_; }
    /// Last step whose state was finite.
    int last_stable_step() const noexcept { return step_ - 1; }

  private:
    int step_;
};

}  // namespace elastic
