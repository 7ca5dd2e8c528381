#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/fourier.hpp"

namespace kamqho {

/// psi_0(x), ..., psi_{count-1}(x): normalized Hermite functions, so that
/// h_i = psi_{i-1}. The recurrence is carried in scaled form; values that
/// underflow double precision come back as 0 instead of NaN.
std::vector<double> hermite_functions(int count, double x);

/// h_i(x), i >= 1.
double eval_hermite(int i, double x);

/// Gauss-Hermite rule adapted to Hermite functions: sum_q w_q f(x_q) ~ int f dx
/// is exact for f = h_i h_j whenever i + j <= 2Q.
class HermiteBasis {
 public:
  /// Small bases still get node_factor * kMinNodeBase nodes.
  static constexpr int kMinNodeBase = 64;

  /// N functions h_1..h_N on node_factor * max(N, kMinNodeBase) nodes.
  explicit HermiteBasis(int N, int node_factor = 4);

  [[nodiscard]] int size() const { return N_; }
  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const RVector& nodes() const { return nodes_; }
  [[nodiscard]] const RVector& weights() const { return weights_; }
  /// G(q, i) = sqrt(w_q) h_{i+1}(x_q), a Q x N matrix.
  [[nodiscard]] const Eigen::MatrixXd& sampled() const { return sampled_; }

  /// G^T G
  [[nodiscard]] Eigen::MatrixXd gram() const;
  /// max |G^T G - I|
  [[nodiscard]] double gram_defect() const;

 private:
  int N_;
  RVector nodes_;
  RVector weights_;
  Eigen::MatrixXd sampled_;
};

struct LadderReport {
  double max_residual = 0.0;
  /// Coefficient of h_2 in T^dagger h_1 (sqrt 2 exactly).
  double t_dagger_h1 = 0.0;
  /// Coefficient of h_3 in T T^dagger h_3 (6 exactly).
  double t_t_dagger_h3 = 0.0;
};

/// Applies T = d/dx + x and T^dagger = -d/dx + x to h_i (i <= N - 1) on the
/// basis nodes. Multiplication by x happens pointwise, d/dx in coefficient
/// space; the result is compared with the ladder identities.
LadderReport ladder_check(const HermiteBasis& basis);

using PotentialFn = std::function<Complex(double x, std::span<const Complex> theta)>;

struct PotentialSpec {
  std::string name;
  int n = 1;
  double sigma = 1.0;
  /// Claimed bound C on |V| and |x dV/dx| over the strip.
  double c_bound = 1.0;
  /// Unbounded test potentials (like V = x) skip the bound audit.
  bool audit_exempt = false;
  PotentialFn v;
};

/// Built-in potentials: "zero", "one", "x", "cos_decay" and "remark"
/// (prod_l cos(theta_l) <x>^{-mu}). Throws DomainError for unknown names.
PotentialSpec make_potential(const std::string& name, int n = 1, double sigma = 1.0,
                             double mu = 1.0);

struct AuditReport {
  double max_v = 0.0;
  double max_x_dv = 0.0;
  /// Largest |Im V| seen at real theta.
  double max_imag_real_theta = 0.0;
  bool exempt = false;
  bool pass = false;
};

/// Samples |V| and |x dV/dx| on x in [-20, 20] (201 points) and |x| in {50, 100},
/// over a 16^n theta grid at Im theta in {0, +-0.9 sigma}.
AuditReport audit_potential(const PotentialSpec& pot);

/// P_ij = int V(x, theta) h_i h_j dx by quadrature. When `check` is given the
/// same matrix is assembled on its (finer) nodes and AccuracyError is thrown if
/// any entry moves by more than tol * max(1, max |P|).
DecayMatrix assemble_P(const HermiteBasis& basis, const PotentialSpec& pot,
                       std::span<const Complex> theta, const HermiteBasis* check = nullptr,
                       double tol = 1e-9);
DecayMatrix assemble_P(const HermiteBasis& basis, const PotentialSpec& pot,
                       std::span<const double> theta, const HermiteBasis* check = nullptr,
                       double tol = 1e-9);

struct DecayReport {
  /// sup (1+|i-j|)^alpha |P_ij| over the samples
  double c_alpha = 0.0;
  /// sup (ij)^beta |dP_ij| over the samples
  double c_beta = 0.0;
  int alpha_i = 0, alpha_j = 0;
  int beta_i = 0, beta_j = 0;
};

/// Decay constants of a family of matrices (1-based attaining indices).
DecayReport verify_P_decay(std::span<const DecayMatrix> samples, const NormParams& p = {});

/// Fourier series of theta -> P(theta), sampled on the 2K + 2 grid.
FourierMatrixSeries perturbation_series(const HermiteBasis& basis, const PotentialSpec& pot,
                                        int K);

}  // namespace kamqho
