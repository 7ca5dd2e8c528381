#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace kamqho {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Exponents of the decay norms: off-diagonal decay alpha, diagonal-difference
/// decay beta. The algebra lemmas need 0 < beta <= alpha.
struct NormParams {
  double alpha = 1.0;
  double beta = 0.5;

  /// Throws DomainError unless 0 < beta <= alpha.
  void validate() const;
};

enum class NormKind {
  Alpha,          ///< sup (1+|i-j|)^a |A_ij|
  AlphaBeta,      ///< sup (1+|i-j|)^a |A_ij| + sup (ij)^b |dA_ij|
  AlphaPlus,      ///< sup (1+|i-j|)^(a+1) |A_ij|
  AlphaPlusBeta,  ///< sup (1+|i-j|)^(a+1) |A_ij| + sup (1+|i-j|)(ij)^b |dA_ij|
};

/// Finite N x N truncation of an infinite matrix indexed from 1.
///
/// Storage is a dense Eigen matrix; `entry(i, j)` uses the 1-based indices of
/// the infinite object while `mat()` exposes the 0-based Eigen view.
class DecayMatrix {
 public:
  DecayMatrix() = default;
  explicit DecayMatrix(int n, bool hermitian = false);
  explicit DecayMatrix(CMatrix m, bool hermitian = false);

  static DecayMatrix identity(int n);
  static DecayMatrix diagonal(const RVector& d);

  [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
  [[nodiscard]] Complex entry(int i, int j) const { return m_(i - 1, j - 1); }
  Complex& entry(int i, int j) { return m_(i - 1, j - 1); }

  [[nodiscard]] const CMatrix& mat() const { return m_; }
  CMatrix& mat() { return m_; }

  [[nodiscard]] bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  /// max |A_ij - conj(A_ji)|
  [[nodiscard]] double hermiticity_defect() const;
  [[nodiscard]] double max_abs() const;

  DecayMatrix& operator+=(const DecayMatrix& o);
  DecayMatrix& operator-=(const DecayMatrix& o);
  DecayMatrix& operator*=(Complex s);

 private:
  CMatrix m_;
  bool hermitian_ = false;
};

DecayMatrix operator+(DecayMatrix a, const DecayMatrix& b);
DecayMatrix operator-(DecayMatrix a, const DecayMatrix& b);
DecayMatrix operator*(Complex s, DecayMatrix a);

/// (dA)_ij = A_{i+1,j+1} - A_ij, an (N-1) x (N-1) matrix. Needs N >= 2.
DecayMatrix delta(const DecayMatrix& a);

double norm_alpha(const DecayMatrix& a, const NormParams& p);
double norm_alpha_beta(const DecayMatrix& a, const NormParams& p);
double norm_alpha_plus(const DecayMatrix& a, const NormParams& p);
double norm_alpha_plus_beta(const DecayMatrix& a, const NormParams& p);
double decay_norm(const DecayMatrix& a, NormKind kind, const NormParams& p);

/// Same suprema evaluated directly on an Eigen matrix (1-based weights).
double decay_norm(const CMatrix& a, NormKind kind, const NormParams& p);

DecayMatrix product(const DecayMatrix& a, const DecayMatrix& b);
/// AB - BA
DecayMatrix commutator(const DecayMatrix& a, const DecayMatrix& b);

/// e^B by scaling and squaring of a Taylor polynomial. B is scaled to
/// 1-norm <= 1/2 and the series stops once a term drops below tol/1000;
/// throws ConvergenceError if that takes more than 60 terms.
DecayMatrix matrix_exp(const DecayMatrix& b, double tol = 1e-13);
CMatrix expm(const CMatrix& b, double tol = 1e-13);

/// Which bound of the operator-norm lemma is being measured.
enum class OperatorBound {
  /// ||A||_{B(l^2_s)} against |A|_{alpha+}, s in (-2 alpha - 1, 2 alpha + 1).
  AlphaPlusOnLs,
  /// Case split on alpha against |A|_alpha:
  /// alpha <= 1/2: B(l^2_1, l^2_-1); 1/2 < alpha <= 1: B(l^2_0, l^2_s), s < 2 alpha - 2;
  /// alpha > 1: B(l^2_0).
  AlphaCases,
};

struct RatioReport {
  double op_norm = 0.0;
  double decay_norm = 0.0;
  /// op_norm / decay_norm: the empirical constant
  double ratio = 0.0;
  double s_in = 0.0;
  double s_out = 0.0;
  int iterations = 0;
};

/// Operator norm of A between weighted spaces l^2_s (||xi||_s^2 = sum i^s |xi_i|^2)
/// estimated by power iteration on D_out A D_in^{-1}, divided by the decay
/// norm the lemma pairs it with. Throws DomainError when s is outside the
/// admissible range and ConvergenceError when power iteration stalls.
RatioReport op_norm_bound_check(const DecayMatrix& a, const NormParams& p, double s,
                                OperatorBound bound = OperatorBound::AlphaPlusOnLs);

/// ||W||_2 for W = D_out A D_in^{-1}, weights i^{s/2}.
double weighted_operator_norm(const CMatrix& a, double s_in, double s_out, int* iterations = nullptr);

/// Random member of M_{alpha+, beta}:
///   A_ij = (1+|i-j|)^{-(alpha+1)} [t_{i-j} + (ij)^{-beta} (r_{i-j} + e_ij / 2)]
/// with t, r, e uniform in the complex unit square. Entries are hashed from
/// (seed, i, j), so the N x N matrix is the leading block of every larger one.
DecayMatrix random_decay_matrix(int n, const NormParams& p, std::uint64_t seed);

/// Largest empirical constants of the algebra lemma over a random suite.
struct AlgebraConstants {
  /// |AB|_{alpha+, beta} / (|A|_{alpha+, beta} |B|_{alpha+, beta})
  double plus_product = 0.0;
  /// |AB|_{alpha, beta} / (|A|_{alpha, beta} |B|_{alpha+, beta})
  double left_product = 0.0;
  /// |BA|_{alpha, beta} / (|A|_{alpha, beta} |B|_{alpha+, beta})
  double right_product = 0.0;
  /// ||A||_{B(l^2_s)} / |A|_{alpha+} over s in {-alpha, 0, alpha}
  double op_plus = 0.0;
  /// AlphaCases ratio (s = 2 alpha - 2.25 in the middle case)
  double op_cases = 0.0;
  int samples = 0;
};

AlgebraConstants algebra_constants(int n, int samples, std::uint64_t seed, const NormParams& p);

}  // namespace kamqho
