#include "kamqho/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kamqho/errors.hpp"

namespace kamqho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

int int_pow(int base, int e) {
  int r = 1;
  for (int l = 0; l < e; ++l) r *= base;
  return r;
}

void check_compatible(const FourierMatrixSeries& a, const FourierMatrixSeries& b) {
  if (a.n() != b.n() || a.dim() != b.dim()) {
    throw DomainError("incompatible Fourier series (torus dimension or matrix size)");
  }
}

}  // namespace

int mode_norm(const Mode& k) {
  int r = 0;
  for (int c : k) r = std::max(r, std::abs(c));
  return r;
}

double dot(const Mode& k, std::span<const double> omega) {
  if (omega.size() != k.size()) throw DomainError("frequency vector has wrong dimension");
  double s = 0.0;
  for (std::size_t l = 0; l < k.size(); ++l) s += k[l] * omega[l];
  return s;
}

ThetaGrid::ThetaGrid(int n, int points_per_dim) : n_(n), m_(points_per_dim) {
  if (n < 1 || points_per_dim < 1) throw DomainError("theta grid needs n >= 1 and M >= 1");
  size_ = int_pow(m_, n_);
}

ThetaGrid ThetaGrid::for_cutoff(int n, int K) { return ThetaGrid(n, 2 * K + 2); }

std::vector<double> ThetaGrid::point(int idx) const {
  std::vector<double> th(n_);
  for (int l = 0; l < n_; ++l) {
    th[l] = kTwoPi * (idx % m_) / m_;
    idx /= m_;
  }
  return th;
}

FourierMatrixSeries::FourierMatrixSeries(int n, int K, int dim, double sigma, bool hermitian)
    : n_(n), K_(K), dim_(dim), sigma_(sigma), hermitian_(hermitian), side_(2 * K + 1) {
  if (n < 1 || K < 0 || dim < 1) throw DomainError("invalid Fourier series shape");
  coeffs_.assign(int_pow(side_, n), CMatrix::Zero(dim, dim));
}

FourierMatrixSeries FourierMatrixSeries::constant(int n, const DecayMatrix& m, double sigma) {
  FourierMatrixSeries s(n, 0, m.dim(), sigma, m.hermitian());
  s.coeffs_[0] = m.mat();
  return s;
}

Mode FourierMatrixSeries::mode(int idx) const {
  Mode k(n_);
  for (int l = 0; l < n_; ++l) {
    k[l] = idx % side_ - K_;
    idx /= side_;
  }
  return k;
}

int FourierMatrixSeries::index(const Mode& k) const {
  if (static_cast<int>(k.size()) != n_) throw DomainError("mode has wrong dimension");
  int idx = 0;
  int stride = 1;
  for (int l = 0; l < n_; ++l) {
    if (std::abs(k[l]) > K_) return -1;
    idx += (k[l] + K_) * stride;
    stride *= side_;
  }
  return idx;
}

DecayMatrix FourierMatrixSeries::coeff(const Mode& k) const {
  const int idx = index(k);
  if (idx < 0) return DecayMatrix(dim_);
  return DecayMatrix(coeffs_[idx], hermitian_ && mode_norm(k) == 0);
}

void FourierMatrixSeries::set_coeff(const Mode& k, const CMatrix& m) {
  const int idx = index(k);
  if (idx < 0) throw DomainError("mode outside the series cutoff");
  if (m.rows() != dim_ || m.cols() != dim_) throw DomainError("coefficient has wrong size");
  coeffs_[idx] = m;
}

int FourierMatrixSeries::support(double threshold) const {
  int s = 0;
  for (int idx = 0; idx < mode_count(); ++idx) {
    if (coeffs_[idx].cwiseAbs().maxCoeff() > threshold) s = std::max(s, mode_norm(mode(idx)));
  }
  return s;
}

double FourierMatrixSeries::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

double FourierMatrixSeries::hermiticity_defect() const {
  double d = 0.0;
  for (int idx = 0; idx < mode_count(); ++idx) {
    Mode k = mode(idx);
    for (int& c : k) c = -c;
    const int jdx = index(k);
    d = std::max(d, (coeffs_[jdx] - coeffs_[idx].adjoint()).cwiseAbs().maxCoeff());
  }
  return d;
}

FourierMatrixSeries FourierMatrixSeries::with_cutoff(int K2) const {
  FourierMatrixSeries out(n_, K2, dim_, sigma_, hermitian_);
  for (int idx = 0; idx < mode_count(); ++idx) {
    const int jdx = out.index(mode(idx));
    if (jdx >= 0) out.coeffs_[jdx] = coeffs_[idx];
  }
  return out;
}

FourierMatrixSeries& FourierMatrixSeries::operator+=(const FourierMatrixSeries& o) {
  check_compatible(*this, o);
  if (o.K_ > K_) *this = with_cutoff(o.K_);
  for (int idx = 0; idx < o.mode_count(); ++idx) coeffs_[index(o.mode(idx))] += o.coeffs_[idx];
  hermitian_ = hermitian_ && o.hermitian_;
  return *this;
}

FourierMatrixSeries& FourierMatrixSeries::operator-=(const FourierMatrixSeries& o) {
  check_compatible(*this, o);
  if (o.K_ > K_) *this = with_cutoff(o.K_);
  for (int idx = 0; idx < o.mode_count(); ++idx) coeffs_[index(o.mode(idx))] -= o.coeffs_[idx];
  hermitian_ = hermitian_ && o.hermitian_;
  return *this;
}

FourierMatrixSeries& FourierMatrixSeries::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  hermitian_ = hermitian_ && s.imag() == 0.0;
  return *this;
}

FourierMatrixSeries operator+(FourierMatrixSeries a, const FourierMatrixSeries& b) {
  return a += b;
}
FourierMatrixSeries operator-(FourierMatrixSeries a, const FourierMatrixSeries& b) {
  return a -= b;
}
FourierMatrixSeries operator*(Complex s, FourierMatrixSeries a) { return a *= s; }

FourierMatrixSeries analyze(std::span<const CMatrix> samples, const ThetaGrid& grid, int K,
                            double sigma, bool hermitian) {
  if (grid.points_per_dim() < 2 * K + 1) {
    throw AliasingError("grid with " + std::to_string(grid.points_per_dim()) +
                        " points per dimension cannot resolve cutoff K = " + std::to_string(K));
  }
  if (static_cast<int>(samples.size()) != grid.size() || samples.empty()) {
    throw DomainError("sample count does not match the grid");
  }
  const int n = grid.n();
  const int m = grid.points_per_dim();
  const int dim = static_cast<int>(samples[0].rows());
  FourierMatrixSeries out(n, K, dim, sigma, hermitian);

  // phase[c + K][p] = e^{-i c 2 pi p / M}
  std::vector<std::vector<Complex>> phase(2 * K + 1, std::vector<Complex>(m));
  for (int c = -K; c <= K; ++c) {
    for (int p = 0; p < m; ++p) {
      const long long r = (static_cast<long long>(c) * p) % m;
      phase[c + K][p] = std::polar(1.0, -kTwoPi * static_cast<double>(r) / m);
    }
  }
  const double inv = 1.0 / grid.size();
  for (int idx = 0; idx < out.mode_count(); ++idx) {
    const Mode k = out.mode(idx);
    CMatrix acc = CMatrix::Zero(dim, dim);
    for (int p = 0; p < grid.size(); ++p) {
      Complex ph(1.0, 0.0);
      int rem = p;
      for (int l = 0; l < n; ++l) {
        ph *= phase[k[l] + K][rem % m];
        rem /= m;
      }
      acc += ph * samples[p];
    }
    out.coeff_at(idx) = acc * inv;
  }
  return out;
}

FourierMatrixSeries analyze(std::span<const DecayMatrix> samples, const ThetaGrid& grid, int K,
                            double sigma, bool hermitian) {
  std::vector<CMatrix> raw;
  raw.reserve(samples.size());
  for (const auto& s : samples) raw.push_back(s.mat());
  return analyze(std::span<const CMatrix>(raw), grid, K, sigma, hermitian);
}

DecayMatrix synthesize(const FourierMatrixSeries& s, std::span<const Complex> theta) {
  if (static_cast<int>(theta.size()) != s.n()) throw DomainError("theta has wrong dimension");
  double im = 0.0;
  for (const auto& t : theta) im = std::max(im, std::abs(t.imag()));
  if (im > 0.0 && !(im < s.sigma())) {
    throw DomainError("theta outside the analyticity strip |Im theta| < sigma");
  }
  CMatrix acc = CMatrix::Zero(s.dim(), s.dim());
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    const Mode k = s.mode(idx);
    Complex arg(0.0, 0.0);
    for (int l = 0; l < s.n(); ++l) arg += static_cast<double>(k[l]) * theta[l];
    acc += std::exp(kI * arg) * s.coeff_at(idx);
  }
  return DecayMatrix(std::move(acc), s.hermitian() && im == 0.0);
}

CMatrix synthesize_real(const FourierMatrixSeries& s, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != s.n()) throw DomainError("theta has wrong dimension");
  CMatrix acc = CMatrix::Zero(s.dim(), s.dim());
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    const Mode k = s.mode(idx);
    double arg = 0.0;
    for (int l = 0; l < s.n(); ++l) arg += k[l] * theta[l];
    acc += std::polar(1.0, arg) * s.coeff_at(idx);
  }
  return acc;
}

AdaptiveSeries analyze_adaptive(const MatrixSampler& sampler, int n, int K_start, int K_cap,
                                double tol, double sigma, bool hermitian) {
  if (K_start < 1 || K_cap < K_start) throw DomainError("adaptive analysis needs 1 <= K_start <= K_cap");
  AdaptiveSeries out;
  int K = K_start;
  for (;;) {
    const ThetaGrid grid(n, 2 * K + 1);
    std::vector<CMatrix> samples;
    samples.reserve(grid.size());
    for (int g = 0; g < grid.size(); ++g) {
      const auto th = grid.point(g);
      samples.push_back(sampler(th));
    }
    FourierMatrixSeries s = analyze(std::span<const CMatrix>(samples), grid, K, sigma, hermitian);
    const int band = (3 * K) / 4;
    double tail = 0.0;
    for (int idx = 0; idx < s.mode_count(); ++idx) {
      if (mode_norm(s.mode(idx)) > band) tail = std::max(tail, s.coeff_at(idx).cwiseAbs().maxCoeff());
    }
    const double scale = s.max_abs();
    out.K_grid = K;
    out.tail = tail;
    out.resolved = tail <= tol * scale;
    if (out.resolved || K >= K_cap) {
      out.series = s.with_cutoff(s.support(tol * scale));
      return out;
    }
    K = std::min(K_cap, 2 * K);
  }
}

DecayMatrix average(const FourierMatrixSeries& s) { return s.coeff(Mode(s.n(), 0)); }

std::pair<FourierMatrixSeries, FourierMatrixSeries> split_tail(const FourierMatrixSeries& s,
                                                               int K_cut) {
  if (K_cut < 0 || K_cut > s.K()) throw DomainError("split_tail needs 0 <= K_cut <= K");
  FourierMatrixSeries head(s.n(), K_cut, s.dim(), s.sigma(), s.hermitian());
  FourierMatrixSeries tail(s.n(), s.K(), s.dim(), s.sigma(), s.hermitian());
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    const Mode k = s.mode(idx);
    if (mode_norm(k) <= K_cut) {
      head.coeff_at(head.index(k)) = s.coeff_at(idx);
    } else {
      tail.coeff_at(idx) = s.coeff_at(idx);
    }
  }
  return {std::move(head), std::move(tail)};
}

FourierMatrixSeries theta_time_derivative(const FourierMatrixSeries& s,
                                          std::span<const double> omega) {
  FourierMatrixSeries out = s;
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    out.coeff_at(idx) *= kI * dot(s.mode(idx), omega);
  }
  // i (k.omega) flips hermitian coefficients into anti-hermitian ones.
  out.set_hermitian(false);
  return out;
}

double strip_norm(const FourierMatrixSeries& s, NormKind kind, const NormParams& p,
                  double sigma_prime, const StripSampling& sampling) {
  if (!(sigma_prime < s.sigma()) || sigma_prime < 0.0) {
    throw DomainError("strip_norm needs 0 <= sigma' < sigma");
  }
  const int n = s.n();
  const int m = std::max(sampling.min_points, 2 * s.support() + 2);
  const ThetaGrid grid(n, m);
  const double y = sampling.imag_fraction * sigma_prime;
  const int combos = y > 0.0 ? int_pow(3, n) : 1;
  const double levels[3] = {0.0, y, -y};

  double sup = 0.0;
  std::vector<Complex> theta(n);
  for (int p_idx = 0; p_idx < grid.size(); ++p_idx) {
    const auto re = grid.point(p_idx);
    for (int c = 0; c < combos; ++c) {
      int rem = c;
      for (int l = 0; l < n; ++l) {
        theta[l] = Complex(re[l], levels[rem % 3]);
        rem /= 3;
      }
      const DecayMatrix v = synthesize(s, theta);
      sup = std::max(sup, decay_norm(v, kind, p));
    }
  }
  return sup;
}

FamilyNorm strip_norm_family(const SeriesFamily& family, NormKind kind, const NormParams& p,
                             double sigma_prime, std::span<const std::vector<double>> omegas,
                             double h, const StripSampling& sampling) {
  FamilyNorm out;
  for (const auto& w : omegas) {
    const FourierMatrixSeries s0 = family(w);
    out.theta_part = std::max(out.theta_part, strip_norm(s0, kind, p, sigma_prime, sampling));
    for (std::size_t l = 0; l < w.size(); ++l) {
      std::vector<double> wp = w, wm = w;
      wp[l] += h;
      wm[l] -= h;
      FourierMatrixSeries d = family(wp) - family(wm);
      d *= Complex(0.5 / h, 0.0);
      d.set_sigma(s0.sigma());
      out.omega_part = std::max(out.omega_part, strip_norm(d, kind, p, sigma_prime, sampling));
    }
  }
  out.value = std::max(out.theta_part, out.omega_part);
  return out;
}

}  // namespace kamqho
