#include "doctest.h"

#include <cmath>
#include <vector>

#include "kamqho/errors.hpp"
#include "kamqho/hermite.hpp"
#include "kamqho/kam.hpp"

using namespace kamqho;

namespace {

FourierMatrixSeries cos_decay_P0(int N, double eps) {
  HermiteBasis b(N);
  FourierMatrixSeries P0 = perturbation_series(b, make_potential("cos_decay"), 2);
  P0 = P0.with_cutoff(P0.support(1e-15 * P0.max_abs()));
  P0 *= Complex(eps, 0.0);
  return P0;
}

const double kSqrt2 = std::sqrt(2.0);

}  // namespace

TEST_CASE("schedule values") {
  KamSchedule s(1e-3, 0.9);
  // mpmath, 30 digits
  CHECK(s.eps(0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(s.eps(1) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(s.eps(2) == doctest::Approx(4.6415888336127791e-6).epsilon(1e-12));
  CHECK(s.eps(3) == doctest::Approx(7.742636826811271e-8).epsilon(1e-12));
  CHECK(s.eps(4) == doctest::Approx(3.3000347911252849e-10).epsilon(1e-12));
  CHECK(s.kappa(1) == doctest::Approx(0.64938163157621132).epsilon(1e-13));
  CHECK(s.kappa(2) == doctest::Approx(0.56234132519034908).epsilon(1e-13));
  CHECK(s.kappa(3) == doctest::Approx(0.46415888336127789).epsilon(1e-13));
  CHECK(s.kappa(4) == doctest::Approx(0.35938136638046273).epsilon(1e-13));
  CHECK(s.sigma(1) == doctest::Approx(0.62643280416568803).epsilon(1e-13));
  CHECK(s.sigma(2) == doctest::Approx(0.55804100520711004).epsilon(1e-13));
  CHECK(s.sigma(3) == doctest::Approx(0.5276446501144087).epsilon(1e-13));
  CHECK(s.sigma(4) == doctest::Approx(0.5105467003747642).epsilon(1e-13));
  CHECK(s.K_real(1) == doctest::Approx(50.5013421504).epsilon(1e-10));
  CHECK(s.K_real(2) == doctest::Approx(269.340491469).epsilon(1e-10));
  CHECK(s.K_real(3) == doctest::Approx(808.021474407).epsilon(1e-10));
  CHECK(s.K_real(4) == doctest::Approx(1915.31016156).epsilon(1e-10));
  CHECK(s.K(1) == 50);
  CHECK(s.K(4) == 1915);
}

TEST_CASE("schedule properties") {
  for (double eps0 : {1e-2, 1e-3, 1e-6}) {
    KamSchedule s(eps0, 0.7);
    double total_drop = 0.0;
    for (int m = 1; m <= 30; ++m) {
      CHECK(s.log_eps(m) < s.log_eps(m - 1));
      CHECK(s.sigma(m) < s.sigma(m - 1));
      CHECK(s.sigma(m) > 0.5 * s.sigma0());
      CHECK(s.log_eps(m) == doctest::Approx(4.0 / 3.0 * s.log_eps(m - 1)));
      total_drop += s.sigma_drop(m);
    }
    CHECK(total_drop < 0.5 * s.sigma0());
  }
  CHECK_THROWS_AS(KamSchedule(1.5, 0.9), DomainError);
  CHECK_THROWS_AS(KamSchedule(1e-3, 0.0), DomainError);
}

TEST_CASE("Gauss-Legendre on [0, 1]") {
  auto [x, w] = gauss_legendre01(8);
  // numpy.polynomial.legendre.leggauss(8), mapped to [0, 1]
  const double xs[] = {0.019855071751231912, 0.10166676129318664, 0.2372337950418355,
                       0.4082826787521751,   0.5917173212478248,  0.7627662049581645,
                       0.8983332387068134,   0.9801449282487681};
  const double ws[] = {0.050614268145188344, 0.11119051722668717, 0.15685332293894352,
                       0.18134189168918088};
  REQUIRE(x.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(x[i] == doctest::Approx(xs[i]).epsilon(1e-13));
    CHECK(w[i] == doctest::Approx(ws[i < 4 ? i : 7 - i]).epsilon(1e-13));
  }
  // exact up to degree 15
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += w[i] * std::pow(x[i], 15);
  CHECK(s == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre01(0), DomainError);
}

TEST_CASE("budget of the excluded measure") {
  BudgetReport b = measure_budget(1e-3, 0.5, 1.0);
  CHECK(b.iota1 == doctest::Approx(1.0 / 3.0));
  CHECK(b.exponent == doctest::Approx(1.0 / 51.0));
  // mpmath nsum
  CHECK(b.sum == doctest::Approx(5.8376764944645262).epsilon(1e-10));
  CHECK(b.bound == doctest::Approx(1.7466523247656866).epsilon(1e-12));
  CHECK_FALSE(b.pass);
  // the inequality first holds at eps0 = a^{1/x}, sum_{m>=1} a^{(4/3)^m - 1} = 1, a = 0.19446...
  CHECK(std::log(budget_threshold(1.0 / 51.0)) == doctest::Approx(-83.513671606393534).epsilon(1e-9));
  CHECK(measure_budget(1e-40, 0.5, 1.0).pass);
}

TEST_CASE("P = 0 is a fixed point") {
  const int N = 12;
  FourierMatrixSeries P0(1, 2, N, 1.0, true);
  const double omega[] = {kSqrt2};
  KamSchedule s(1e-3, 0.9);
  KamState st = initial_state(P0, SpectrumModel::qho(), omega, s);
  KamState next = kam_step(st, s);
  CHECK(next.m == 1);
  CHECK(next.P.max_abs() == 0.0);
  CHECK((next.lambda - st.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.log.back().norm_B == 0.0);
}

TEST_CASE("diagonal constant P is absorbed in one step") {
  const int N = 10;
  CMatrix d = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) d(i, i) = 1e-3 / (i + 1);
  FourierMatrixSeries P0 = FourierMatrixSeries::constant(1, DecayMatrix(d, true), 1.0);
  const double omega[] = {kSqrt2};
  KamSchedule s(1e-3, 0.9);
  KamState next = kam_step(initial_state(P0, SpectrumModel::qho(), omega, s), s);
  for (int i = 0; i < N; ++i) {
    CHECK(next.lambda(i) == doctest::Approx(2.0 * i + 1.0 + 1e-3 / (i + 1)).epsilon(1e-15));
  }
  CHECK(next.P.max_abs() < 1e-18);
}

TEST_CASE("eps = 0 leaves the spectrum and the transform trivial") {
  const int N = 12;
  FourierMatrixSeries P0(1, 2, N, 1.0, true);
  const double omega[] = {kSqrt2};
  ReducibilityResult r = run(P0, SpectrumModel::qho(), omega, 1e-3, 0.9);
  CHECK(r.status == RunStatus::Converged);
  for (int i = 0; i < N; ++i) CHECK(r.lambda_inf(i) == 2.0 * i + 1.0);
  CHECK(r.max_shift == 0.0);
  const double theta[] = {0.37};
  CHECK((compose_transform(r.generators, theta, N).mat() - CMatrix::Identity(N, N)).norm() == 0.0);
}

TEST_CASE("compose_transform of one generator is its exponential") {
  const int N = 6;
  FourierMatrixSeries B(1, 1, N, 0.9, false);
  CMatrix b = CMatrix::Zero(N, N);
  b(0, 2) = Complex(0.01, 0.02);
  b(2, 0) = -std::conj(b(0, 2));
  B.set_coeff(Mode{0}, b);
  const double theta[] = {1.1};
  std::vector<FourierMatrixSeries> gens{B};
  DecayMatrix e = compose_transform(gens, theta, N);
  CHECK((e.mat() - matrix_exp(DecayMatrix(b)).mat()).norm() < 1e-15);
  CHECK((e.mat().adjoint() * e.mat() - CMatrix::Identity(N, N)).norm() < 1e-14);
}

TEST_CASE("cos_decay reduction at omega = sqrt 2") {
  const int N = 16;
  const double eps0 = 1e-3;
  FourierMatrixSeries P0 = cos_decay_P0(N, eps0);
  const double omega[] = {kSqrt2};
  KamConfig cfg;
  ReducibilityResult r = run(P0, SpectrumModel::qho(), omega, eps0, 0.9, cfg);
  KamSchedule s(eps0, 0.9);

  CHECK(r.status == RunStatus::Converged);
  REQUIRE(r.log.size() >= 2);
  for (const KamStepRecord& rec : r.log) {
    if (rec.m == 0) continue;
    CHECK(rec.norm_P <= s.eps(rec.m));
    CHECK(rec.within_schedule);
    CHECK(rec.deferred == 0);
    CHECK(rec.homological_residual < 1e-13);
  }
  CHECK(r.max_shift <= 2.0 * eps0);
  for (int i = 1; i < N; ++i) CHECK(r.lambda_inf(i) > r.lambda_inf(i - 1));

  ResidualReport res = reducibility_residual(r, P0);
  CHECK(res.total < 10.0 * cfg.stop_tol);

  TransformReport t = transform_deviation(r.Phi, 2.0);
  CHECK(t.unitarity < 1e-13);
  CHECK(t.deviation < 2.0 * s.eps(0));

  // Cauchy: ||Phi_{m+1} - Phi_m|| <= 2 eps_m^{2/3} at every theta
  for (std::size_t m = 0; m < r.generators.size(); ++m) {
    for (int q = 0; q < 16; ++q) {
      const double theta[] = {2.0 * M_PI * q / 16};
      const CMatrix a = compose_transform(std::span(r.generators).first(m), theta, N).mat();
      const CMatrix b = compose_transform(std::span(r.generators).first(m + 1), theta, N).mat();
      CHECK((b - a).norm() <= 2.0 * std::pow(s.eps(static_cast<int>(m)), 2.0 / 3.0));
    }
  }

  SUBCASE("the residual detects a corrupted generator") {
    ReducibilityResult bad = r;
    FourierMatrixSeries& g = bad.generators.front();
    g.coeff_at(g.index(Mode{1}))(0, 2) += 1e-3;
    bad.Phi = transform_series(bad.generators, 1, N, r.Phi.sigma(), cfg);
    CHECK(reducibility_residual(bad, P0).total >= 1e-4);
  }
}

TEST_CASE("resonant frequency is refused") {
  // k = -1, i - j = -2: -4 + 4 = 0 with an even coupling of size ~ 6e-5
  FourierMatrixSeries P0 = cos_decay_P0(12, 1e-3);
  const double omega[] = {4.0};
  CHECK_THROWS_AS(run(P0, SpectrumModel::qho(), omega, 1e-3, 0.9), ResonantFrequency);
}

TEST_CASE("oversized perturbation is reported as blowup") {
  FourierMatrixSeries P0 = cos_decay_P0(12, 1e-3);
  P0 *= Complex(50.0, 0.0);
  const double omega[] = {kSqrt2};
  KamSchedule s(1e-3, 0.9);
  KamState st = initial_state(P0, SpectrumModel::qho(), omega, s);
  CHECK_THROWS_AS(kam_step(st, s), NormBlowup);

  ReducibilityResult r = run(P0, SpectrumModel::qho(), omega, 1e-3, 0.9);
  CHECK_FALSE(r.precondition_ok);
  CHECK(r.status == RunStatus::Blowup);
  CHECK(r.blowup_step >= 1);
}
