#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "kamqho/decay_matrix.hpp"

namespace kamqho {

/// Integer frequency vector k in Z^n.
using Mode = std::vector<int>;

/// sup-norm |k|
int mode_norm(const Mode& k);
double dot(const Mode& k, std::span<const double> omega);

/// Uniform tensor grid on the n-torus: theta_l = 2 pi m_l / M, m_l = 0..M-1.
/// Points are enumerated with the first component varying fastest.
class ThetaGrid {
 public:
  ThetaGrid(int n, int points_per_dim);

  /// 2K + 2 points per dimension: exact for series band-limited to |k| <= K.
  static ThetaGrid for_cutoff(int n, int K);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int points_per_dim() const { return m_; }
  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] std::vector<double> point(int idx) const;

 private:
  int n_;
  int m_;
  int size_;
};

/// Matrix-valued trigonometric polynomial sum_{|k| <= K} coeff(k) e^{i k.theta}
/// on the n-torus, with dense storage over the box [-K, K]^n.
class FourierMatrixSeries {
 public:
  FourierMatrixSeries() = default;
  /// Zero series.
  FourierMatrixSeries(int n, int K, int dim, double sigma, bool hermitian);

  /// Single coefficient at k = 0.
  static FourierMatrixSeries constant(int n, const DecayMatrix& m, double sigma);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int K() const { return K_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double sigma() const { return sigma_; }
  void set_sigma(double s) { sigma_ = s; }
  [[nodiscard]] bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  [[nodiscard]] int mode_count() const { return static_cast<int>(coeffs_.size()); }
  [[nodiscard]] Mode mode(int idx) const;
  /// Storage index of k; -1 when |k| > K.
  [[nodiscard]] int index(const Mode& k) const;

  [[nodiscard]] const CMatrix& coeff_at(int idx) const { return coeffs_[idx]; }
  CMatrix& coeff_at(int idx) { return coeffs_[idx]; }
  /// coeff(k); zero matrix when |k| > K.
  [[nodiscard]] DecayMatrix coeff(const Mode& k) const;
  void set_coeff(const Mode& k, const CMatrix& m);

  /// Largest |k| carrying a coefficient with an entry above `threshold`.
  [[nodiscard]] int support(double threshold = 0.0) const;
  /// max over k of max |coeff(k)_ij|
  [[nodiscard]] double max_abs() const;
  /// max over k of |coeff(-k) - coeff(k)^H|
  [[nodiscard]] double hermiticity_defect() const;

  /// Same series stored with cutoff K2 (zero-padded or truncated).
  [[nodiscard]] FourierMatrixSeries with_cutoff(int K2) const;

  FourierMatrixSeries& operator+=(const FourierMatrixSeries& o);
  FourierMatrixSeries& operator-=(const FourierMatrixSeries& o);
  FourierMatrixSeries& operator*=(Complex s);

 private:
  int n_ = 0;
  int K_ = 0;
  int dim_ = 0;
  double sigma_ = 0.0;
  bool hermitian_ = false;
  int side_ = 1;
  std::vector<CMatrix> coeffs_;
};

FourierMatrixSeries operator+(FourierMatrixSeries a, const FourierMatrixSeries& b);
FourierMatrixSeries operator-(FourierMatrixSeries a, const FourierMatrixSeries& b);
FourierMatrixSeries operator*(Complex s, FourierMatrixSeries a);

/// Discrete Fourier analysis of samples taken on `grid` (grid order).
/// coeff(k) = grid average of P(theta) e^{-i k.theta}. Throws AliasingError
/// when the grid has fewer than 2K + 1 points per dimension.
FourierMatrixSeries analyze(std::span<const DecayMatrix> samples, const ThetaGrid& grid, int K,
                            double sigma, bool hermitian);
FourierMatrixSeries analyze(std::span<const CMatrix> samples, const ThetaGrid& grid, int K,
                            double sigma, bool hermitian);

/// sum_k coeff(k) e^{i k.theta} at a complex torus point. Throws DomainError
/// unless |Im theta| < sigma (sup over components).
DecayMatrix synthesize(const FourierMatrixSeries& s, std::span<const Complex> theta);
/// Real theta; no strip check needed.
CMatrix synthesize_real(const FourierMatrixSeries& s, std::span<const double> theta);

/// theta -> matrix at real theta
using MatrixSampler = std::function<CMatrix(std::span<const double> theta)>;

struct AdaptiveSeries {
  FourierMatrixSeries series;
  /// Cutoff of the last sampling grid.
  int K_grid = 0;
  /// False when K_cap was reached with the outer band still above tolerance.
  bool resolved = false;
  /// max |coeff| over the outer quarter of the last grid's box
  double tail = 0.0;
};

/// Samples on 2K + 1 point grids for K = K_start, 2 K_start, ... (at most K_cap) until
/// the coefficients with |k| > 3K/4 drop below tol * max |coeff|, then trims
/// the cutoff to the largest mode above that threshold.
AdaptiveSeries analyze_adaptive(const MatrixSampler& sampler, int n, int K_start, int K_cap,
                                double tol, double sigma, bool hermitian);

/// coeff(0)
DecayMatrix average(const FourierMatrixSeries& s);

/// Exact partition into modes |k| <= K_cut and |k| > K_cut.
std::pair<FourierMatrixSeries, FourierMatrixSeries> split_tail(const FourierMatrixSeries& s,
                                                               int K_cut);

/// coeff(k) -> i (k.omega) coeff(k): d/dt of s(omega t).
FourierMatrixSeries theta_time_derivative(const FourierMatrixSeries& s,
                                          std::span<const double> omega);

/// Sampling used by the strip norms. Real parts run over a uniform grid with
/// at least `min_points` (and at least 2 support + 2) points per dimension; the
/// imaginary parts over {0, +-0.95 sigma'}^n.
struct StripSampling {
  int min_points = 16;
  double imag_fraction = 0.95;
};

/// sup of |S(theta)| in the chosen decay norm over real and complex theta with
/// |Im theta| <= 0.95 sigma'. Throws DomainError unless sigma' < S.sigma.
double strip_norm(const FourierMatrixSeries& s, NormKind kind, const NormParams& p,
                  double sigma_prime, const StripSampling& sampling = {});

/// omega -> series, for norms that include the derivative in omega.
using SeriesFamily = std::function<FourierMatrixSeries(std::span<const double> omega)>;

struct FamilyNorm {
  double value = 0.0;       ///< max of the l = 0 and l = 1 parts
  double theta_part = 0.0;  ///< sup of |S(omega, theta)|
  double omega_part = 0.0;  ///< sup of |d_omega S| by central differences (approximate)
};

/// Parameter-space norm: sup over sampled omega and theta of |d_omega^l S|, l = 0, 1.
/// The omega derivative uses central differences with step h.
FamilyNorm strip_norm_family(const SeriesFamily& family, NormKind kind, const NormParams& p,
                             double sigma_prime, std::span<const std::vector<double>> omegas,
                             double h = 1e-4, const StripSampling& sampling = {});

}  // namespace kamqho
