#pragma once

#include <span>
#include <string>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/homological.hpp"
#include "kamqho/spectrum.hpp"

namespace kamqho {

/// Parameter schedule of the iteration:
///   eps_m = eps_{m-1}^{4/3}, kappa_m = eps_{m-1}^{1/16},
///   sigma_{m-1} - sigma_m = (sigma0 / 2 C*) m^{-2}, C* = pi^2 / 6,
///   K_m = 2 (sigma_{m-1} - sigma_m)^{-1} ln(1 / eps_{m-1}).
class KamSchedule {
 public:
  KamSchedule(double eps0, double sigma0);

  static constexpr double kCStar = 1.6449340668482264;  // pi^2 / 6

  [[nodiscard]] double eps0() const { return eps0_; }
  [[nodiscard]] double sigma0() const { return sigma0_; }
  /// ln eps_m = (4/3)^m ln eps0
  [[nodiscard]] double log_eps(int m) const;
  [[nodiscard]] double eps(int m) const;
  /// m >= 1
  [[nodiscard]] double kappa(int m) const;
  [[nodiscard]] double sigma(int m) const;
  /// sigma_{m-1} - sigma_m, m >= 1
  [[nodiscard]] double sigma_drop(int m) const;
  /// Real-valued K_m (m >= 1).
  [[nodiscard]] double K_real(int m) const;
  /// Integer cutoff floor(K_m), at least 1.
  [[nodiscard]] int K(int m) const;

 private:
  double eps0_;
  double sigma0_;
};

struct BudgetReport {
  double iota1 = 0.0;
  /// iota1 / 17
  double exponent = 0.0;
  /// sum_{m >= 0} eps_m^{iota1 / 17}
  double sum = 0.0;
  /// 2 eps0^{iota1 / 17}
  double bound = 0.0;
  bool pass = false;
  int terms = 0;
};

/// Accumulated excluded-measure budget of the schedule, summed in log space
/// until the terms underflow.
BudgetReport measure_budget(double eps0, double beta, double tau1);

/// Largest eps0 for which sum_m eps_m^x <= 2 eps0^x holds (bisection in log eps0).
double budget_threshold(double exponent);

enum class KappaMode {
  /// Refuse divisors below KamConfig::divisor_floor; kappa_m is only logged.
  Working,
  /// Refuse divisors below the schedule value kappa_m.
  Schedule,
};

struct KamConfig {
  NormParams norm{};
  int max_steps = 4;
  double stop_tol = 1e-14;
  KappaMode kappa_mode = KappaMode::Working;
  double divisor_floor = 1e-10;
  /// Couplings below this fraction of max |P| are left in the remainder.
  double coupling_floor_rel = 1e-14;
  /// ... and below this fraction of max |lambda| (0 disables).
  double roundoff_floor_rel = 0.0;
  /// Resonant couplings no larger than defer_fraction * eps_{m+1} stay in the
  /// remainder for a later step; larger ones raise ResonantFrequency.
  double defer_fraction = 1e-3;
  int quad_order = 8;
  /// Second Gauss-Legendre order for the s-integral audit (0 disables).
  int audit_order = 12;
  /// Audit every this many theta points.
  int audit_stride = 4;
  /// Largest Fourier cutoff used for sampling P_{m+1}.
  int max_grid_K = 256;
  /// Relative size below which Fourier coefficients are dropped.
  double tail_tol = 1e-15;
  /// Throw NormBlowup from kam_step (run() always records instead).
  bool throw_on_blowup = true;
  StripSampling sampling{};
};

struct KamStepRecord {
  int m = 0;
  double eps_m = 0.0;
  double kappa_m = 0.0;
  double sigma_m = 0.0;
  int K_m = 0;
  /// Cutoff actually carried by P_m.
  int K_used = 0;
  /// Outer-band coefficient size of the last sampling grid for P_m.
  double grid_tail = 0.0;
  double norm_Atilde = 0.0;
  double norm_B = 0.0;
  double norm_P = 0.0;
  double min_divisor = 0.0;
  int skipped = 0;
  int deferred = 0;
  double max_deferred = 0.0;
  double homological_residual = 0.0;
  double quad_audit = 0.0;
  double hermiticity = 0.0;
  /// ||A_m - A_0||_{alpha, beta}
  double shift_norm = 0.0;
  bool within_schedule = true;
};

struct KamState {
  int m = 0;
  RVector lambda;
  RVector lambda0;
  FourierMatrixSeries P;
  std::vector<double> omega;
  std::vector<FourierMatrixSeries> generators;
  std::vector<KamStepRecord> log;
};

/// Initial state: A_0 = diag(nu_1..nu_N), P_0 given. Records ||P_0|| at sigma0.
KamState initial_state(const FourierMatrixSeries& P0, const SpectrumModel& model,
                       std::span<const double> omega, const KamSchedule& schedule,
                       const KamConfig& config = {});

/// One conjugation step m -> m + 1:
///   A_{m+1} = A_m + A_tilde_m,
///   P_{m+1} = R_m + int_0^1 e^{-sB} [(1-s)(A_tilde_m + R_m) + s P_m, B] e^{sB} ds,
/// with B = B_{m+1} from the homological equation at cutoff K_{m+1}.
/// Throws ResonantFrequency, and NormBlowup when ||P_{m+1}|| > eps_{m+1}
/// (unless config.throw_on_blowup is false).
KamState kam_step(const KamState& state, const KamSchedule& schedule, const KamConfig& config = {});

enum class RunStatus { Converged, MaxSteps, Blowup };

std::string to_string(RunStatus s);

struct ReducibilityResult {
  RVector lambda_inf;
  RVector lambda0;
  std::vector<double> omega;
  std::vector<FourierMatrixSeries> generators;
  /// Fourier series of Phi = e^{B_1} ... e^{B_m}
  FourierMatrixSeries Phi;
  std::vector<KamStepRecord> log;
  RunStatus status = RunStatus::MaxSteps;
  /// First step whose ||P_m|| exceeded eps_m (0 if none after the start).
  int blowup_step = 0;
  /// ||P_0|| <= eps0 held.
  bool precondition_ok = true;
  double final_norm_P = 0.0;
  /// max_i |lambda_inf_i - nu_i|
  double max_shift = 0.0;
};

/// Iterates kam_step until ||P_m|| <= stop_tol or max_steps, then composes Phi.
/// Stops early once a step is off schedule and ||P_m|| has stopped decreasing.
ReducibilityResult run(const FourierMatrixSeries& P0, const SpectrumModel& model,
                       std::span<const double> omega, double eps0, double sigma0,
                       const KamConfig& config = {});

/// e^{B_1(theta)} ... e^{B_m(theta)} at real theta; identity for no generators.
DecayMatrix compose_transform(std::span<const FourierMatrixSeries> generators,
                              std::span<const double> theta, int dim);

/// Fourier series of theta -> compose_transform(generators, theta).
FourierMatrixSeries transform_series(std::span<const FourierMatrixSeries> generators, int n,
                                     int dim, double sigma, const KamConfig& config = {});

struct ResidualReport {
  double off_diagonal = 0.0;
  double diagonal_variation = 0.0;
  double diagonal_vs_lambda = 0.0;
  /// max over theta of the sum of the three parts
  double total = 0.0;
};

/// Q(theta) = Phi^{-1} (A_0 + P_0(theta)) Phi - i Phi^{-1} (omega . d_theta Phi)
/// on a uniform theta grid, compared with diag(lambda_inf).
ResidualReport reducibility_residual(const ReducibilityResult& result,
                                     const FourierMatrixSeries& P0, int points_per_dim = 0);

struct TransformReport {
  /// max over theta of ||Phi(theta) - I|| on l^2_p
  double deviation = 0.0;
  /// max over theta of max |Phi^* Phi - I|
  double unitarity = 0.0;
};

TransformReport transform_deviation(const FourierMatrixSeries& Phi, double p,
                                    int points_per_dim = 0);

/// Nodes and weights of Gauss-Legendre quadrature on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order);

}  // namespace kamqho
