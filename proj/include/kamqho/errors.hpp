#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kamqho {

/// Argument or state outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sampling grid too coarse for the requested Fourier cutoff.
class AliasingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical approximation (quadrature, series) failed its refinement check.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method (power iteration, Taylor series, step control) gave up.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A small divisor |k.omega + lambda_i - lambda_j| fell below kappa (1 + |i - j|).
class ResonantFrequency : public std::runtime_error {
 public:
  ResonantFrequency(std::vector<int> mode, int row, int col, double divisor, double floor);

  std::vector<int> k;
  int i;
  int j;
  double divisor;
  double floor;
};

/// The perturbation left the iteration schedule: ||P_m|| > eps_m.
class NormBlowup : public std::runtime_error {
 public:
  NormBlowup(int step, double norm, double bound);

  int step;
  double norm;
  double bound;
};

}  // namespace kamqho
