#include "kamqho/decay_matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kamqho/errors.hpp"

namespace kamqho {

void NormParams::validate() const {
  if (!(beta > 0.0) || !(alpha >= beta)) {
    throw DomainError("norm parameters need 0 < beta <= alpha");
  }
}

DecayMatrix::DecayMatrix(int n, bool hermitian)
    : m_(CMatrix::Zero(n, n)), hermitian_(hermitian) {
  if (n < 1) throw DomainError("matrix dimension must be >= 1");
}

DecayMatrix::DecayMatrix(CMatrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw DomainError("decay matrix must be square");
}

DecayMatrix DecayMatrix::identity(int n) {
  return DecayMatrix(CMatrix::Identity(n, n), true);
}

DecayMatrix DecayMatrix::diagonal(const RVector& d) {
  CMatrix m = CMatrix::Zero(d.size(), d.size());
  m.diagonal() = d.cast<Complex>();
  return DecayMatrix(std::move(m), true);
}

double DecayMatrix::hermiticity_defect() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DecayMatrix::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

DecayMatrix& DecayMatrix::operator+=(const DecayMatrix& o) {
  if (o.dim() != dim()) throw DomainError("dimension mismatch in +");
  m_ += o.m_;
  hermitian_ = hermitian_ && o.hermitian_;
  return *this;
}

DecayMatrix& DecayMatrix::operator-=(const DecayMatrix& o) {
  if (o.dim() != dim()) throw DomainError("dimension mismatch in -");
  m_ -= o.m_;
  hermitian_ = hermitian_ && o.hermitian_;
  return *this;
}

DecayMatrix& DecayMatrix::operator*=(Complex s) {
  m_ *= s;
  hermitian_ = hermitian_ && s.imag() == 0.0;
  return *this;
}

DecayMatrix operator+(DecayMatrix a, const DecayMatrix& b) { return a += b; }
DecayMatrix operator-(DecayMatrix a, const DecayMatrix& b) { return a -= b; }
DecayMatrix operator*(Complex s, DecayMatrix a) { return a *= s; }

DecayMatrix delta(const DecayMatrix& a) {
  const int n = a.dim();
  if (n < 2) throw DomainError("delta needs N >= 2");
  const auto& m = a.mat();
  CMatrix d = m.bottomRightCorner(n - 1, n - 1) - m.topLeftCorner(n - 1, n - 1);
  return DecayMatrix(std::move(d), a.hermitian());
}

namespace {

// sup_{i,j} (1+|i-j|)^e |M_ij|
double off_diagonal_sup(const CMatrix& m, double e) {
  const int n = static_cast<int>(m.rows());
  std::vector<double> w(n);
  for (int d = 0; d < n; ++d) w[d] = std::pow(1.0 + d, e);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) s = std::max(s, w[std::abs(i - j)] * std::abs(m(i, j)));
  }
  return s;
}

// sup_{i,j <= N-1} (1+|i-j|)^e (ij)^b |(dM)_ij|
double difference_sup(const CMatrix& m, double e, double b) {
  const int n = static_cast<int>(m.rows());
  if (n < 2) return 0.0;
  std::vector<double> w(n), pw(n);
  for (int d = 0; d < n; ++d) w[d] = std::pow(1.0 + d, e);
  for (int i = 0; i < n; ++i) pw[i] = std::pow(static_cast<double>(i + 1), b);
  double s = 0.0;
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i < n - 1; ++i) {
      const double dij = std::abs(m(i + 1, j + 1) - m(i, j));
      s = std::max(s, w[std::abs(i - j)] * pw[i] * pw[j] * dij);
    }
  }
  return s;
}

}  // namespace

double decay_norm(const CMatrix& a, NormKind kind, const NormParams& p) {
  switch (kind) {
    case NormKind::Alpha:
      return off_diagonal_sup(a, p.alpha);
    case NormKind::AlphaBeta:
      return off_diagonal_sup(a, p.alpha) + difference_sup(a, 0.0, p.beta);
    case NormKind::AlphaPlus:
      return off_diagonal_sup(a, p.alpha + 1.0);
    case NormKind::AlphaPlusBeta:
      return off_diagonal_sup(a, p.alpha + 1.0) + difference_sup(a, 1.0, p.beta);
  }
  return 0.0;
}

double decay_norm(const DecayMatrix& a, NormKind kind, const NormParams& p) {
  return decay_norm(a.mat(), kind, p);
}

double norm_alpha(const DecayMatrix& a, const NormParams& p) {
  return decay_norm(a, NormKind::Alpha, p);
}
double norm_alpha_beta(const DecayMatrix& a, const NormParams& p) {
  return decay_norm(a, NormKind::AlphaBeta, p);
}
double norm_alpha_plus(const DecayMatrix& a, const NormParams& p) {
  return decay_norm(a, NormKind::AlphaPlus, p);
}
double norm_alpha_plus_beta(const DecayMatrix& a, const NormParams& p) {
  return decay_norm(a, NormKind::AlphaPlusBeta, p);
}

DecayMatrix product(const DecayMatrix& a, const DecayMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch in product");
  return DecayMatrix(a.mat() * b.mat(), false);
}

DecayMatrix commutator(const DecayMatrix& a, const DecayMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch in commutator");
  CMatrix ab = a.mat() * b.mat();
  ab.noalias() -= b.mat() * a.mat();
  return DecayMatrix(std::move(ab), false);
}

CMatrix expm(const CMatrix& b, double tol) {
  const int n = static_cast<int>(b.rows());
  if (!b.allFinite()) throw DomainError("matrix_exp: non-finite entries");
  const double norm1 = b.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const CMatrix x = b / std::ldexp(1.0, squarings);

  CMatrix sum = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  constexpr int kMaxOrder = 60;
  bool converged = false;
  for (int k = 1; k <= kMaxOrder; ++k) {
    term = (term * x) / static_cast<double>(k);
    sum += term;
    const double tn = term.cwiseAbs().colwise().sum().maxCoeff();
    if (tn <= tol * 1e-3 || tn == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("matrix_exp: Taylor series did not converge");
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

DecayMatrix matrix_exp(const DecayMatrix& b, double tol) {
  return DecayMatrix(expm(b.mat(), tol), false);
}

double weighted_operator_norm(const CMatrix& a, double s_in, double s_out, int* iterations) {
  const int n = static_cast<int>(a.rows());
  CMatrix w = a;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      w(i, j) *= std::pow(i + 1.0, 0.5 * s_out) / std::pow(j + 1.0, 0.5 * s_in);
    }
  }
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.1 * std::sin(1.0 + i), 0.05 * std::cos(2.0 * i));
  v.normalize();

  constexpr int kMaxIter = 50000;
  double prev = -1.0;
  for (int it = 1; it <= kMaxIter; ++it) {
    CVector wv = w * v;
    const double sigma = wv.norm();
    if (sigma == 0.0) {
      if (iterations) *iterations = it;
      return 0.0;
    }
    CVector next = w.adjoint() * wv;
    const double nn = next.norm();
    if (nn == 0.0) {
      if (iterations) *iterations = it;
      return sigma;
    }
    v = next / nn;
    if (prev > 0.0 && std::abs(sigma - prev) <= 1e-13 * sigma) {
      if (iterations) *iterations = it;
      return sigma;
    }
    prev = sigma;
  }
  throw ConvergenceError("power iteration did not converge");
}

RatioReport op_norm_bound_check(const DecayMatrix& a, const NormParams& p, double s,
                                OperatorBound bound) {
  p.validate();
  RatioReport r;
  if (bound == OperatorBound::AlphaPlusOnLs) {
    const double limit = 2.0 * p.alpha + 1.0;
    if (!(s > -limit && s < limit)) {
      throw DomainError("s = " + std::to_string(s) + " outside (-2 alpha - 1, 2 alpha + 1)");
    }
    r.s_in = r.s_out = s;
    r.decay_norm = norm_alpha_plus(a, p);
  } else {
    if (p.alpha <= 0.5) {
      r.s_in = 1.0;
      r.s_out = -1.0;
    } else if (p.alpha <= 1.0) {
      if (!(s < 2.0 * p.alpha - 2.0)) {
        throw DomainError("s = " + std::to_string(s) + " must be below 2 alpha - 2");
      }
      r.s_in = 0.0;
      r.s_out = s;
    } else {
      r.s_in = r.s_out = 0.0;
    }
    r.decay_norm = norm_alpha(a, p);
  }
  r.op_norm = weighted_operator_norm(a.mat(), r.s_in, r.s_out, &r.iterations);
  r.ratio = r.decay_norm > 0.0 ? r.op_norm / r.decay_norm : 0.0;
  return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform complex number in [-1, 1]^2 keyed by (seed, tag, a, b).
Complex hashed_uniform(std::uint64_t seed, std::uint64_t tag, std::int64_t a, std::int64_t b) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(tag));
  h = splitmix64(h ^ static_cast<std::uint64_t>(a));
  h = splitmix64(h ^ static_cast<std::uint64_t>(b));
  const std::uint64_t h2 = splitmix64(h);
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return {2.0 * (h >> 11) * scale - 1.0, 2.0 * (h2 >> 11) * scale - 1.0};
}

}  // namespace

DecayMatrix random_decay_matrix(int n, const NormParams& p, std::uint64_t seed) {
  p.validate();
  DecayMatrix a(n);
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= n; ++i) {
      const int d = i - j;
      const double w = std::pow(1.0 + std::abs(d), -(p.alpha + 1.0));
      const double g = std::pow(static_cast<double>(i) * j, -p.beta);
      a.entry(i, j) = w * (hashed_uniform(seed, 1, d, 0) +
                           g * (hashed_uniform(seed, 2, d, 0) + 0.5 * hashed_uniform(seed, 3, i, j)));
    }
  }
  return a;
}

AlgebraConstants algebra_constants(int n, int samples, std::uint64_t seed, const NormParams& p) {
  p.validate();
  if (n < 2) throw DomainError("algebra suite needs N >= 2");
  AlgebraConstants c;
  c.samples = samples;
  const double s_mid = 2.0 * p.alpha - 2.25;
  auto window = [n](const CMatrix& m) { return DecayMatrix(CMatrix(m.topLeftCorner(n, n))); };
  for (int k = 0; k < samples; ++k) {
    const DecayMatrix Abig = random_decay_matrix(2 * n, p, seed + 2 * k);
    const DecayMatrix Bbig = random_decay_matrix(2 * n, p, seed + 2 * k + 1);
    const DecayMatrix A = window(Abig.mat());
    const DecayMatrix B = window(Bbig.mat());
    const DecayMatrix AB = window(Abig.mat() * Bbig.mat());
    const DecayMatrix BA = window(Bbig.mat() * Abig.mat());
    const double a_pb = norm_alpha_plus_beta(A, p);
    const double b_pb = norm_alpha_plus_beta(B, p);
    const double a_ab = norm_alpha_beta(A, p);
    c.plus_product = std::max(c.plus_product, norm_alpha_plus_beta(AB, p) / (a_pb * b_pb));
    c.left_product = std::max(c.left_product, norm_alpha_beta(AB, p) / (a_ab * b_pb));
    c.right_product = std::max(c.right_product, norm_alpha_beta(BA, p) / (a_ab * b_pb));
    for (double s : {-p.alpha, 0.0, p.alpha}) {
      c.op_plus = std::max(c.op_plus, op_norm_bound_check(A, p, s).ratio);
    }
    c.op_cases =
        std::max(c.op_cases, op_norm_bound_check(A, p, s_mid, OperatorBound::AlphaCases).ratio);
  }
  return c;
}

}  // namespace kamqho
