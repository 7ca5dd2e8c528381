#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/spectrum.hpp"

namespace kamqho {

enum class ResidualMode {
  None,
  /// max entry of the residual series, coefficient by coefficient
  Coefficients,
  /// strip_norm of the residual series at sigma' = sigma / 2 (alpha, beta norm)
  Strip,
};

struct HomologicalOptions {
  /// Coefficients with |P_ij(k)| <= coupling_floor are not inverted; they
  /// stay in R so the equation remains exact.
  double coupling_floor = 0.0;
  /// Entries whose divisor is below kappa but whose coupling is at most
  /// defer_limit are also left in R instead of raising ResonantFrequency.
  double defer_limit = 0.0;
  ResidualMode residual = ResidualMode::Strip;
  NormParams norm{};
};

/// Solution of [A, B] - i dB/dt = A_tilde - P + R for A = diag(lambda).
struct HomologicalSolution {
  DecayMatrix A_tilde;
  FourierMatrixSeries B;
  FourierMatrixSeries R;
  /// min over inverted (k, i, j) of |k.omega + lambda_i - lambda_j| / (1 + |i - j|)
  double smallest_divisor = 0.0;
  Mode smallest_k;
  int smallest_i = 0;
  int smallest_j = 0;
  /// Number of small-divisor entries left in R by the coupling floor.
  int skipped = 0;
  /// Entries below the divisor floor that were left in R (see defer_limit).
  int deferred = 0;
  double max_deferred = 0.0;
  double residual = 0.0;
};

/// Per-mode, per-entry solution:
///   A_tilde = diag coeff_0(P), R = modes |k| > K,
///   B(k)_ij = -P(k)_ij / (k.omega + lambda_i - lambda_j) for |k| <= K, (k, i - j) != 0.
/// Throws ResonantFrequency when a divisor is below kappa (1 + |i - j|) and the
/// coupling exceeds opts.defer_limit.
HomologicalSolution solve_homological(const RVector& lambda, const FourierMatrixSeries& P,
                                      std::span<const double> omega, int K, double kappa,
                                      const HomologicalOptions& opts = {});

/// Residual series [diag(lambda), B] - i dB/dt - (A_tilde - P + R), coefficientwise.
FourierMatrixSeries homological_residual(const RVector& lambda, const FourierMatrixSeries& P,
                                         std::span<const double> omega,
                                         const HomologicalSolution& sol);

struct KeyLemmaConstants {
  double c_mu = 0.1;
  double c1 = 1.0;
};

struct BoundReport {
  /// |B|_{alpha+, beta}
  double lhs = 0.0;
  /// |Q|_{alpha, beta} / kappa^2
  double scale = 0.0;
  /// lhs / scale
  double ratio = 0.0;
  /// 2^{beta+1} (c_mu + c1 + 1)
  double bound = 0.0;
  bool pass = false;
};

/// B_ij = Q_ij / (k.omega + mu_i - mu_j) (B_ii := 0 when k = 0), checked against
/// |B|_{alpha+, beta} <= C |Q|_{alpha, beta} / kappa^2. Both divisor and
/// spectral-closeness preconditions are verified first (DomainError).
BoundReport key_lemma_check(const DecayMatrix& Q, const RVector& mu, const SpectrumModel& model,
                            std::span<const double> omega, const Mode& k, double kappa,
                            const NormParams& p, const KeyLemmaConstants& constants);

/// omega -> (lambda(omega), P(omega))
using HomologicalFamily =
    std::function<std::pair<RVector, FourierMatrixSeries>(std::span<const double> omega)>;

struct DerivativeReport {
  double residual = 0.0;
  /// Central-difference d_omega_l B for the last l examined.
  FourierMatrixSeries dB;
};

/// Re-solves at omega +- h e_l and checks the differentiated equation
///   (k_l + d lambda_i - d lambda_j) B_ij(k) + (k.omega + lambda_i - lambda_j) dB_ij(k) = -dP_ij(k)
/// on every inverted entry; also dA_tilde = diag d coeff_0(P). Returns the max defect.
DerivativeReport derivative_solution_check(const HomologicalFamily& family,
                                           std::span<const double> omega, int K, double kappa,
                                           double h = 1e-4, const HomologicalOptions& opts = {});

}  // namespace kamqho
