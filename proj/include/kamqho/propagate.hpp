#pragma once

#include <span>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/kam.hpp"

namespace kamqho {

/// Hermite coefficients xi_1..xi_N of a wave function.
using StateVector = CVector;

/// (sum_i i^p |xi_i|^2)^{1/2}
double sobolev_norm(const StateVector& u, double p);

enum class Integrator {
  /// Fourth-order commutator-free Magnus scheme with two exponentials per step.
  Magnus4,
  /// Dormand-Prince 5(4) Runge-Kutta.
  RK45,
};

struct IntegrateOptions {
  Integrator method = Integrator::Magnus4;
  /// Local error per step (2-norm of the state).
  double tol = 1e-10;
  double dt_initial = 0.05;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  /// Spacing of the stored samples (the last sample is at T).
  double sample_dt = 1.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<StateVector> u;
  int steps = 0;
  int rejected = 0;
  /// max_t | ||u(t)||_0 - ||u(0)||_0 |
  double norm_drift = 0.0;
};

/// i u' = (diag(A0) + eps P(omega t)) u on [0, T] with adaptive step control
/// (step doubling for Magnus4, embedded pair for RK45). Throws ConvergenceError
/// when the step size falls below dt_min.
Trajectory integrate(const RVector& A0, const FourierMatrixSeries& P0, double eps,
                     std::span<const double> omega, const StateVector& u0, double T,
                     const IntegrateOptions& opts = {});

/// u(t) = Phi(omega t) e^{-i t Lambda} Phi(0)^{-1} u0 from a reducibility result.
Trajectory reduced_trajectory(const ReducibilityResult& result, const StateVector& u0,
                              std::span<const double> times);

struct DriftReport {
  double max_ratio = 1.0;
  double min_ratio = 1.0;
};

/// Extremal ||u(t)||_p / ||u(0)||_p over the samples, with the top
/// `exclude_top` modes left out of both norms. Requires 0 <= p < 2 alpha + 1.
DriftReport norm_drift_report(const Trajectory& traj, double p, double alpha = 1.0,
                              int exclude_top = 0);

/// max over common samples of ||a(t) - b(t)||_0
double trajectory_distance(const Trajectory& a, const Trajectory& b);

}  // namespace kamqho
