#pragma once

#include <stdexcept>

namespace stablepath {

// Parameter or configuration value outside its admissible range.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Vector length does not match the declared dimension.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The direction lies in the kernel of the semi-norm: its observed part vanishes.
struct KernelVector : std::domain_error {
  using std::domain_error::domain_error;
};

// The path vector admits no spectral representation on the requested cylinder.
struct NotRepresentable : std::domain_error {
  using std::domain_error::domain_error;
};

// The asymmetric alpha=1 log-moment sum diverges, so the cylinder shift is undefined.
struct LogConditionFail : std::domain_error {
  using std::domain_error::domain_error;
};

// The conditioning set carries no spectral mass.
struct ZeroConditioningMass : std::domain_error {
  using std::domain_error::domain_error;
};

// No pattern atom lies within tolerance of the observed window.
struct NoMatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few threshold exceedances for a usable estimate.
struct TooFewExceedances : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The conditioning region fits none of the supported closed-form cases.
struct UnsupportedConditioning : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace stablepath
