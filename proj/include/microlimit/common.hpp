#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace microlimit {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr const char* kVersion = "0.1.0";

/// Raised when arguments violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a sampled configuration hits a probability-zero degeneracy
/// (a node on top of an evaluation pole, coincident points). Callers resample.
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace microlimit
