#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/spectrum.hpp"

namespace kamqho {

/// omega -> lambda(omega), the perturbed diagonal.
using LambdaMap = std::function<RVector(std::span<const double> omega)>;

/// {omega : |k.omega + s_i(omega) - s_j(omega)| < width}, where s is either the
/// fixed spectrum (shift = nu_i - nu_j) or the region's lambda map.
struct ResonanceZone {
  Mode k;
  int i = 0;
  int j = 0;
  double width = 0.0;
  double shift = 0.0;
  bool uses_lambda = false;
};

struct MeasureOptions {
  int samples = 100000;
  std::uint64_t seed = 20240601;
  /// Confidence half-width is z standard errors.
  double z = 3.0;
};

struct MeasureEstimate {
  double value = 0.0;
  double half_width = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  /// Exact Lebesgue measure when available (n = 1, omega-independent zones).
  std::optional<double> exact;
};

/// Parameter domain [0, 2 pi)^n with a list of excluded resonance zones.
class FrequencyRegion {
 public:
  explicit FrequencyRegion(int n);

  [[nodiscard]] int n() const { return n_; }
  /// (2 pi)^n
  [[nodiscard]] double box_measure() const;
  [[nodiscard]] const std::vector<ResonanceZone>& zones() const { return zones_; }
  void add_zone(ResonanceZone z) { zones_.push_back(std::move(z)); }
  void set_lambda(LambdaMap m) { lambda_ = std::move(m); }

  /// True when omega lies in some excluded zone.
  [[nodiscard]] bool excluded(std::span<const double> omega) const;
  /// First few retained samples drawn with the Monte Carlo generator.
  [[nodiscard]] std::vector<std::vector<double>> retained_samples(int count,
                                                                  const MeasureOptions& opts) const;

  /// Monte Carlo estimate of the excluded measure; adds the exact value for
  /// n = 1 when no zone depends on lambda.
  [[nodiscard]] MeasureEstimate measure(const MeasureOptions& opts = {}) const;
  /// sum over zones of (2 pi)^{n-1} 2 width / max_l |k_l|, capped at the box
  /// measure (exact slab bound for fixed zones).
  [[nodiscard]] double union_bound() const;
  /// Exact excluded measure by interval union (n = 1 only).
  [[nodiscard]] double exact_measure_1d() const;

  /// Estimate stored by the region builders.
  MeasureEstimate measured;

 private:
  int n_;
  std::vector<ResonanceZone> zones_;
  LambdaMap lambda_;
};

/// Largest |d| = |i - j| that can violate |k.omega + nu_i - nu_j| >= g (1 + |d|)
/// for some omega in [0, 2 pi)^n, |k| <= K, when the spectrum gaps are >= c0 |d|.
int relevant_difference_bound(int n, int K, double g, double c0);

/// Zones of Hypothesis H2: |k.omega + nu_i - nu_j| < gamma (1 + |i - j|), 0 < |k| <= K.
/// For QHO one zone per (k, d); otherwise all pairs i, j <= N_idx in the window.
FrequencyRegion build_h2_region(const SpectrumModel& model, int n, double gamma, int K,
                                int N_idx = 64, const MeasureOptions& opts = {});

struct DprimeParams {
  double kappa = 0.0;
  double gamma = 0.0;
  int K = 1;
  /// Radius of the closeness condition |d(lambda - nu)_l| <= c / l^{2 beta}.
  double c = 0.0;
  double beta = 0.5;
  double tau1 = 1.0;
  /// Defaults to n + 1.
  std::optional<double> tau2;
  /// Treat lambda as independent of omega (enables the exact 1-D measure).
  bool lambda_constant = false;
};

struct DprimeRegion {
  FrequencyRegion region;
  /// Measure removed by the H2 part alone (D_0 \ D_1 at 2 gamma).
  MeasureEstimate h2_part;
  double iota1 = 0.0;
  double iota2 = 0.0;
  /// kappa^iota1 K^iota2
  double bound = 0.0;
  int window_j = 0;
  int window_d = 0;
};

/// D' = D_1 intersected with (D \ D_2): D_1 is the H2 region at 2 gamma, D_2 the
/// union of window zones |k.omega + lambda_i - lambda_j| < kappa (1 + |i - j|)
/// for j <= (c / gamma)^{1/(2 beta)}, 0 <= i - j <= window_d, 0 < |k| <= K.
/// Throws DomainError unless kappa = gamma^{1 + 1/beta} and lambda is in the c-ball.
DprimeRegion build_Dprime(const LambdaMap& lambda, const SpectrumModel& model, int n,
                          const DprimeParams& params, const MeasureOptions& opts = {});

double iota1(double beta, double tau1);
double iota2(int n, double tau2);

struct MeasureReport {
  double measure = 0.0;
  /// 2 kappa / varsigma
  double bound = 0.0;
  double min_derivative = 0.0;
  bool pass = false;
};

/// Meas{x in [0, 1] : |f(x)| <= kappa} on a uniform grid with linear
/// interpolation per cell (exact for linear f). The derivative bound
/// |f'| >= varsigma is audited on the same grid (DomainError on failure).
MeasureReport interval_measure(const std::function<double(double)>& f, double varsigma,
                               double kappa, int cells = 1000000);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kamqho
