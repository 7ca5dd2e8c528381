#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "kamqho/errors.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/hermite.hpp"

using namespace kamqho;

namespace {

CMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

FourierMatrixSeries random_series(int n, int K, int dim, std::mt19937_64& rng, bool hermitian) {
  FourierMatrixSeries s(n, K, dim, 1.0, hermitian);
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    const Mode k = s.mode(idx);
    double decay = std::exp(-0.5 * mode_norm(k));
    s.coeff_at(idx) = decay * random_matrix(dim, rng);
  }
  if (hermitian) {
    for (int idx = 0; idx < s.mode_count(); ++idx) {
      Mode mk = s.mode(idx);
      for (int& v : mk) v = -v;
      const int j = s.index(mk);
      if (j < idx) continue;
      if (j == idx) {
        s.coeff_at(idx) = 0.5 * (s.coeff_at(idx) + s.coeff_at(idx).adjoint()).eval();
      } else {
        s.coeff_at(j) = s.coeff_at(idx).adjoint();
      }
    }
  }
  return s;
}

std::vector<CMatrix> sample(const FourierMatrixSeries& s, const ThetaGrid& g) {
  std::vector<CMatrix> out;
  for (int q = 0; q < g.size(); ++q) out.push_back(synthesize_real(s, g.point(q)));
  return out;
}

CMatrix cos_matrix() {
  CMatrix m(3, 3);
  m << 1.0, 0.5, 0.0, 0.5, -2.0, 0.25, 0.0, 0.25, 3.0;
  return m;
}

}  // namespace

TEST_CASE("analyze constant and cosine maps") {
  const ThetaGrid g = ThetaGrid::for_cutoff(1, 3);
  CHECK(g.points_per_dim() == 8);
  const CMatrix M = cos_matrix();
  std::vector<CMatrix> cst(g.size(), M);
  const FourierMatrixSeries a = analyze(cst, g, 3, 1.0, true);
  CHECK((a.coeff(Mode{0}).mat() - M).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(a.coeff(Mode{1}).max_abs() <= 1e-15);

  std::vector<CMatrix> cs;
  for (int q = 0; q < g.size(); ++q) cs.push_back(std::cos(g.point(q)[0]) * M);
  const FourierMatrixSeries c = analyze(cs, g, 3, 1.0, true);
  CHECK((c.coeff(Mode{1}).mat() - 0.5 * M).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((c.coeff(Mode{-1}).mat() - 0.5 * M).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(average(c).max_abs() <= 1e-15);
  CHECK_THROWS_AS(analyze(cs, g, 4, 1.0, true), AliasingError);
}

TEST_CASE("round trip of the cos_decay matrix") {
  const HermiteBasis b(16);
  const PotentialSpec pot = make_potential("cos_decay");
  const ThetaGrid g(1, 16);
  std::vector<DecayMatrix> samples;
  for (int q = 0; q < g.size(); ++q) samples.push_back(assemble_P(b, pot, std::span<const double>(g.point(q))));
  const FourierMatrixSeries s = analyze(samples, g, 7, 1.0, true);
  double worst = 0.0;
  for (int q = 0; q < g.size(); ++q) {
    worst = std::max(worst, (synthesize_real(s, g.point(q)) - samples[q].mat()).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
  CHECK(average(s).max_abs() <= 1e-15);
}

TEST_CASE("synthesize at complex theta") {
  const CMatrix M = cos_matrix();
  FourierMatrixSeries s(1, 1, 3, 1.0, true);
  s.set_coeff(Mode{1}, 0.5 * M);
  s.set_coeff(Mode{-1}, 0.5 * M);
  const Complex th[1] = {Complex(0.0, 0.1)};
  CHECK((synthesize(s, th).mat() - std::cosh(0.1) * M).cwiseAbs().maxCoeff() <= 1e-15);
  const Complex out[1] = {Complex(0.0, 1.0)};
  CHECK_THROWS_AS(synthesize(s, out), DomainError);

  const FourierMatrixSeries c = FourierMatrixSeries::constant(2, DecayMatrix(M), 1.0);
  const Complex th2[2] = {Complex(0.3, 0.2), Complex(-1.0, 0.4)};
  CHECK((synthesize(c, th2).mat() - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthesize against naive summation") {
  std::mt19937_64 rng(1);
  const FourierMatrixSeries s = random_series(2, 3, 4, rng, false);
  const double th[2] = {0.7, -2.1};
  CMatrix naive = CMatrix::Zero(4, 4);
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = -3; k2 <= 3; ++k2)
      naive += s.coeff(Mode{k1, k2}).mat() * std::exp(Complex(0.0, k1 * th[0] + k2 * th[1]));
  CHECK((synthesize_real(s, th) - naive).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("analyze inverts synthesize for band-limited data") {
  std::mt19937_64 rng(2);
  const FourierMatrixSeries s = random_series(2, 2, 3, rng, true);
  const ThetaGrid g = ThetaGrid::for_cutoff(2, 2);
  const FourierMatrixSeries back = analyze(sample(s, g), g, 2, 1.0, true);
  CHECK((back - s).max_abs() <= 1e-14);

  // Parseval: grid mean of |S|^2 equals the coefficient sum
  double grid = 0.0, coeff = 0.0;
  for (const CMatrix& m : sample(s, g)) grid += m.squaredNorm();
  grid /= g.size();
  for (int idx = 0; idx < s.mode_count(); ++idx) coeff += s.coeff_at(idx).squaredNorm();
  CHECK(std::abs(grid - coeff) <= 1e-10 * coeff);
}

TEST_CASE("split_tail is an exact partition") {
  std::mt19937_64 rng(4);
  const FourierMatrixSeries s = random_series(1, 5, 3, rng, true);
  auto [head, tail] = split_tail(s, 5);
  CHECK(tail.max_abs() == 0.0);
  auto [h0, t0] = split_tail(s, 0);
  CHECK((h0.coeff(Mode{0}).mat() - s.coeff(Mode{0}).mat()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h0.coeff(Mode{1}).max_abs() == 0.0);
  auto [h2, t2] = split_tail(s, 2);
  const FourierMatrixSeries sum = h2 + t2;
  for (int idx = 0; idx < s.mode_count(); ++idx) {
    CHECK((sum.coeff(s.mode(idx)).mat() - s.coeff_at(idx)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(t2.coeff(Mode{2}).max_abs() == 0.0);
  CHECK(h2.coeff(Mode{3}).max_abs() == 0.0);
}

TEST_CASE("time derivative symbol") {
  const CMatrix M = cos_matrix();
  const double omega[2] = {1.5, 0.4};
  const FourierMatrixSeries c = FourierMatrixSeries::constant(2, DecayMatrix(M), 1.0);
  CHECK(theta_time_derivative(c, omega).max_abs() == 0.0);
  FourierMatrixSeries one(2, 1, 3, 1.0, false);
  one.set_coeff(Mode{1, 0}, M);
  const FourierMatrixSeries d = theta_time_derivative(one, omega);
  CHECK((d.coeff(Mode{1, 0}).mat() - Complex(0.0, 1.5) * M).cwiseAbs().maxCoeff() <= 1e-15);

  std::mt19937_64 rng(8);
  const FourierMatrixSeries s = random_series(2, 3, 3, rng, true);
  const FourierMatrixSeries ds = theta_time_derivative(s, omega);
  const double t = 0.37, h = 1e-5;
  auto at = [&](const FourierMatrixSeries& x, double tt) {
    const double th[2] = {omega[0] * tt, omega[1] * tt};
    return synthesize_real(x, th);
  };
  const CMatrix fd = (at(s, t + h) - at(s, t - h)) / (2.0 * h);
  CHECK((fd - at(ds, t)).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, at(ds, t).cwiseAbs().maxCoeff()));
}

TEST_CASE("strip norms") {
  const NormParams p{1.0, 0.5};
  const FourierMatrixSeries zero(1, 2, 4, 1.0, true);
  CHECK(strip_norm(zero, NormKind::AlphaBeta, p, 0.5) == 0.0);

  const CMatrix M = cos_matrix();
  const FourierMatrixSeries c = FourierMatrixSeries::constant(1, DecayMatrix(M), 1.0);
  CHECK(strip_norm(c, NormKind::AlphaBeta, p, 0.5) == doctest::Approx(decay_norm(M, NormKind::AlphaBeta, p)).epsilon(1e-14));

  FourierMatrixSeries s(1, 1, 3, 1.0, true);
  s.set_coeff(Mode{1}, 0.5 * M);
  s.set_coeff(Mode{-1}, 0.5 * M);
  const double sp = 0.6;
  const double sampled = strip_norm(s, NormKind::Alpha, p, sp);
  // dense oracle: 10x finer real grid at the same imaginary levels
  double dense = 0.0;
  for (int q = 0; q < 640; ++q) {
    for (double y : {0.0, 0.95 * sp, -0.95 * sp}) {
      const Complex th[1] = {Complex(2.0 * M_PI * q / 640.0, y)};
      dense = std::max(dense, norm_alpha(synthesize(s, th), p));
    }
  }
  CHECK(std::abs(sampled - dense) <= 0.02 * dense);
  CHECK(sampled == doctest::Approx(std::cosh(0.95 * sp) * norm_alpha(DecayMatrix(M), p)).epsilon(1e-12));

  std::mt19937_64 rng(12);
  const FourierMatrixSeries r = random_series(1, 4, 4, rng, true);
  double prev = 0.0;
  for (double x : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double v = strip_norm(r, NormKind::AlphaBeta, p, x);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(strip_norm(r, NormKind::AlphaBeta, p, 1.0), DomainError);
}

TEST_CASE("adaptive analysis stops at the resolved cutoff") {
  const CMatrix M = cos_matrix();
  const MatrixSampler f = [&](std::span<const double> th) -> CMatrix {
    return std::cos(th[0]) * M + 0.25 * std::cos(3.0 * th[0]) * M.transpose();
  };
  const AdaptiveSeries a = analyze_adaptive(f, 1, 2, 64, 1e-14, 1.0, true);
  CHECK(a.resolved);
  CHECK(a.series.K() == 3);
  CHECK((a.series.coeff(Mode{3}).mat() - 0.125 * M.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}
