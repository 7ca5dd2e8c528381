// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/errors.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/hermite.hpp"
#include "kamqho/homological.hpp"
#include "kamqho/kam.hpp"
#include "kamqho/propagate.hpp"
#include "kamqho/resonance.hpp"
#include "kamqho/spectrum.hpp"

using namespace kamqho;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d %-28s %s  [%.1f s < %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs, limit_s, in_time ? "" : " exceeded");
  std::fflush(stdout);
}

RVector qho_nu(int N) {
  const SpectrumModel m = SpectrumModel::qho();
  RVector v(N);
  for (int i = 0; i < N; ++i) v(i) = m.nu(i + 1);
  return v;
}

FourierMatrixSeries random_hermitian(int K, int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FourierMatrixSeries s(1, K, N, 1.0, true);
  for (int k = 0; k <= K; ++k) {
    CMatrix m(N, N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i)
        m(i, j) = std::exp(-0.5 * k) * Complex(g(rng), g(rng)) / std::pow(1.0 + std::abs(i - j), 2);
    if (k == 0) {
      s.set_coeff(Mode{0}, 0.5 * (m + m.adjoint()));
    } else {
      s.set_coeff(Mode{k}, m);
      s.set_coeff(Mode{-k}, m.adjoint());
    }
  }
  return s;
}

FourierMatrixSeries cos_decay_series(int N) {
  const HermiteBasis b(N);
  FourierMatrixSeries s = perturbation_series(b, make_potential("cos_decay"), 2);
  return s.with_cutoff(s.support(1e-15 * s.max_abs()));
}

Trajectory prefix(const Trajectory& tr, double T) {
  Trajectory out;
  for (std::size_t s = 0; s < tr.t.size() && tr.t[s] <= T + 1e-9; ++s) {
    out.t.push_back(tr.t[s]);
    out.u.push_back(tr.u[s]);
  }
  return out;
}

}  // namespace

int main() {
  const double sqrt2 = std::sqrt(2.0);
  const NormParams p11{1.0, 0.5};

  criterion(1, "homological exactness", 60, [&] {
    std::mt19937_64 rng(101);
    const int N = 32, K = 4;
    const double omega[] = {sqrt2};
    const RVector lam = qho_nu(N);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const FourierMatrixSeries P = random_hermitian(K, N, rng);
      const HomologicalSolution s = solve_homological(lam, P, omega, K, 0.01);
      const double coeff = homological_residual(lam, P, omega, s).max_abs();
      worst = std::max({worst, s.residual, coeff});
    }
    return Outcome{worst <= 1e-11, fmt("max residual %.3e <= 1e-11 over 50 draws", worst)};
  });

  criterion(2, "key lemma bound", 60, [&] {
    const int N = 32;
    const SpectrumModel qho = SpectrumModel::qho();
    const RVector mu = qho_nu(N);
    const double omega[] = {sqrt2};
    const double C = std::pow(2.0, 1.5) * 2.1;
    double worst = 0.0, bound = 0.0;
    for (int t = 0; t < 100; ++t) {
      const DecayMatrix Q = random_decay_matrix(N, p11, 5000 + t);
      const Mode k{t % 3};
      const BoundReport r = key_lemma_check(Q, mu, qho, omega, k, 0.1, p11, {0.1, 1.0});
      worst = std::max(worst, r.ratio);
      bound = r.bound;
    }
    const bool ok = std::abs(bound - C) <= 1e-14 * C && worst <= C;
    return Outcome{ok, fmt("max ratio %.4f <= C = %.6f (100 draws, k in {0,1,2})", worst, bound)};
  });

  criterion(3, "P decay stability", 120, [&] {
    const PotentialSpec pot = make_potential("cos_decay");
    DecayReport r[2];
    const int sizes[] = {64, 128};
    for (int s = 0; s < 2; ++s) {
      const HermiteBasis b(sizes[s]);
      std::vector<DecayMatrix> samples;
      for (int q = 0; q < 16; ++q) {
        const double th[] = {2.0 * M_PI * q / 16};
        samples.push_back(assemble_P(b, pot, th));
      }
      r[s] = verify_P_decay(samples, p11);
    }
    const double da = std::abs(r[1].c_alpha - r[0].c_alpha) / r[0].c_alpha;
    const double db = std::abs(r[1].c_beta - r[0].c_beta) / r[0].c_beta;
    return Outcome{da <= 0.05 && db <= 0.05,
                   fmt("c_alpha %.6f -> %.6f (%.1e), c_beta %.6f -> %.6f (%.1e), <= 5%%",
                       r[0].c_alpha, r[1].c_alpha, da, r[0].c_beta, r[1].c_beta, db)};
  });

  // Criteria 4-6 share one run.
  const int N = 64;
  const double eps0 = 1e-3;
  const FourierMatrixSeries P_unit = cos_decay_series(N);
  ReducibilityResult red;
  FourierMatrixSeries P0 = P_unit;
  P0 *= Complex(eps0, 0.0);
  bool have_run = false;

  criterion(4, "KAM convergence", 300, [&] {
    const double omega[] = {1.0};
    KamConfig cfg;
    cfg.stop_tol = 0.0;
    cfg.max_steps = 4;
    red = run(P0, SpectrumModel::qho(), omega, eps0, 0.9, cfg);
    have_run = true;
    const KamSchedule s(eps0, 0.9);
    bool ok = red.log.size() == 5;
    std::string norms;
    for (const KamStepRecord& rec : red.log) {
      if (rec.m == 0) continue;
      ok = ok && rec.norm_P <= s.eps(rec.m);
      norms += fmt(" %.2e/%.2e", rec.norm_P, s.eps(rec.m));
    }
    const ResidualReport res = reducibility_residual(red, P0);
    ok = ok && res.off_diagonal <= 1e-8;
    return Outcome{ok, fmt("|P_m|/eps_m:%s; off-diagonal residual %.2e <= 1e-8", norms.c_str(),
                           res.off_diagonal)};
  });

  criterion(5, "eigenvalue shift", 1, [&] {
    if (!have_run) return Outcome{false, "no KAM run"};
    const double shift = (red.lambda_inf - red.lambda0).head(N - 8).cwiseAbs().maxCoeff();
    return Outcome{shift <= 2.0 * eps0, fmt("max_{i<=N-8} |lambda_i - nu_i| = %.3e <= %.1e", shift, 2.0 * eps0)};
  });

  criterion(6, "transformation bound", 120, [&] {
    if (!have_run) return Outcome{false, "no KAM run"};
    const double bound = 4.0 * std::pow(eps0, 2.0 / 3.0);
    const TransformReport t0 = transform_deviation(red.Phi, 0.0);
    const TransformReport t2 = transform_deviation(red.Phi, 2.0);
    const double unit = std::max(t0.unitarity, t2.unitarity);
    const bool ok = t0.deviation <= bound && t2.deviation <= bound && unit <= 1e-10;
    return Outcome{ok, fmt("|Phi - I| p=0 %.3e, p=2 %.3e <= %.3e; unitarity %.2e <= 1e-10",
                           t0.deviation, t2.deviation, bound, unit)};
  });

  criterion(7, "measure scaling", 120, [&] {
    const int Ks[] = {2, 4, 8};
    const double gammas[] = {1e-2, 5e-3, 2.5e-3};
    MeasureOptions mo;
    mo.samples = 100000;
    mo.seed = 20240601;
    bool agree = true;
    double exact[3][3];
    double worst_dev = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int g = 0; g < 3; ++g) {
        const FrequencyRegion r = build_h2_region(SpectrumModel::qho(), 1, gammas[g], Ks[a], 64, mo);
        const MeasureEstimate m = r.measure(mo);
        exact[a][g] = r.exact_measure_1d();
        const double dev = std::abs(m.value - exact[a][g]);
        agree = agree && dev <= m.half_width;
        worst_dev = std::max(worst_dev, dev / m.half_width);
      }
    }
    double min_gamma_slope = 1e300, max_K_slope = -1e300;
    const double Kd[] = {2.0, 4.0, 8.0};
    for (int a = 0; a < 3; ++a) {
      const double y[] = {exact[a][0], exact[a][1], exact[a][2]};
      min_gamma_slope = std::min(min_gamma_slope, log_log_slope(gammas, y));
    }
    for (int g = 0; g < 3; ++g) {
      const double y[] = {exact[0][g], exact[1][g], exact[2][g]};
      max_K_slope = std::max(max_K_slope, log_log_slope(Kd, y));
    }
    const bool ok = agree && min_gamma_slope >= 0.9 && max_K_slope <= 2.3;
    return Outcome{ok, fmt("MC within half-width (worst %.2f hw); gamma slope %.3f >= 0.9; "
                           "K slope %.3f <= 2.3",
                           worst_dev, min_gamma_slope, max_K_slope)};
  });

  criterion(8, "auxiliary measure", 10, [&] {
    const MeasureReport tight = interval_measure([](double x) { return x - 0.5; }, 1.0, 0.1);
    bool ok = std::abs(tight.measure - 0.2) <= 1e-9;
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const double s = 0.5 + 2.5 * U(rng), b = 2.0 * U(rng), c = U(rng), w = 0.3 * U(rng);
      const double kappa = 0.01 + 0.19 * U(rng);
      // f' = s + 3 b x^2 + w s cos(x) >= s (1 - w) > 0
      auto f = [=](double x) { return s * (x - c) + b * x * x * x + w * s * std::sin(x); };
      const double varsigma = s * (1.0 - w);
      const MeasureReport r = interval_measure(f, varsigma, kappa, 200000);
      worst = std::max(worst, r.measure / r.bound);
    }
    ok = ok && worst <= 1.0;
    return Outcome{ok, fmt("tight case %.12f = 0.2; 20 random samples max measure/bound %.4f <= 1",
                           tight.measure, worst)};
  });

  criterion(9, "Sobolev norm band", 600, [&] {
    const double omega[] = {sqrt2};
    const FrequencyRegion h2 = build_h2_region(SpectrumModel::qho(), 1, 0.01, 8);
    const bool admissible = !h2.excluded(omega);
    StateVector u0 = StateVector::Zero(N);
    for (int i = 0; i < 4; ++i) u0(i) = 1.0;
    u0.normalize();
    const Trajectory tr = integrate(qho_nu(N), P_unit, eps0, omega, u0, 2000.0);
    auto fitted = [&](const Trajectory& x) {
      const DriftReport d = norm_drift_report(x, 2.0, 1.0, 8);
      return std::max(d.max_ratio - 1.0, 1.0 - d.min_ratio) / eps0;
    };
    const double C1 = fitted(prefix(tr, 1000.0));
    const double C2 = fitted(tr);
    const double rel = std::abs(C2 - C1) / C1;
    const bool ok = admissible && C1 > 0.0 && rel <= 0.2 && tr.norm_drift <= 1e-8;
    return Outcome{ok, fmt("C(T=1000) %.4f, C(T=2000) %.4f, change %.1e <= 20%%; l2 drift %.1e; "
                           "omega admissible %s",
                           C1, C2, rel, tr.norm_drift, admissible ? "yes" : "no")};
  });

  criterion(10, "norm algebra", 120, [&] {
    const AlgebraConstants a = algebra_constants(16, 100, 7, p11);
    const AlgebraConstants b = algebra_constants(32, 100, 7, p11);
    auto steady = [](double small, double large) { return large <= 1.01 * small; };
    bool ok = steady(a.plus_product, b.plus_product) && steady(a.left_product, b.left_product) &&
              steady(a.right_product, b.right_product) && steady(a.op_plus, b.op_plus) &&
              steady(a.op_cases, b.op_cases);
    std::string detail =
        fmt("N=16 -> 32: (i) %.4f->%.4f (ii) %.4f->%.4f (iii) %.4f->%.4f (iv) %.4f->%.4f, "
            "%.4f->%.4f, each <= +1%%",
            a.plus_product, b.plus_product, a.left_product, b.left_product, a.right_product,
            b.right_product, a.op_plus, b.op_plus, a.op_cases, b.op_cases);

    // Case split: the map spaces follow alpha, and s outside the middle range is refused.
    struct Case {
      double alpha, s, s_in, s_out;
    };
    const Case cases[] = {{0.4, 0.0, 1.0, -1.0}, {0.5, 0.0, 1.0, -1.0}, {0.8, -0.5, 0.0, -0.5},
                          {1.0, -0.25, 0.0, -0.25}, {1.5, 0.0, 0.0, 0.0}};
    for (const Case& c : cases) {
      const NormParams p{c.alpha, std::min(0.5, c.alpha)};
      double worst = 0.0;
      for (int t = 0; t < 100; ++t) {
        const RatioReport r =
            op_norm_bound_check(random_decay_matrix(32, p, 900 + t), p, c.s, OperatorBound::AlphaCases);
        ok = ok && r.s_in == c.s_in && r.s_out == c.s_out && std::isfinite(r.ratio);
        worst = std::max(worst, r.ratio);
      }
      detail += fmt("; alpha %.1f ratio %.3f", c.alpha, worst);
    }
    bool refused = false;
    try {
      op_norm_bound_check(random_decay_matrix(16, {0.8, 0.5}, 1), {0.8, 0.5}, -0.4 + 1e-3,
                          OperatorBound::AlphaCases);
    } catch (const DomainError&) {
      refused = true;
    }
    ok = ok && refused;
    detail += refused ? "; s >= 2 alpha - 2 refused" : "; s >= 2 alpha - 2 accepted";
    return Outcome{ok, detail};
  });

  criterion(11, "measure exponent budget", 1, [&] {
    const BudgetReport b = measure_budget(1e-3, 0.5, 1.0);
    const bool arithmetic = std::abs(b.iota1 - 1.0 / 3.0) <= 1e-15 && std::abs(b.exponent - 1.0 / 51.0) <= 1e-15;
    const double threshold = budget_threshold(b.exponent);
    return Outcome{arithmetic && b.pass,
                   fmt("iota1 %.6f, exponent 1/%.4f; sum_m eps_m^(1/51) = %.4f vs 2 eps0^(1/51) = %.4f "
                       "at eps0 = 1e-3 (holds only for eps0 <= %.3e)",
                       b.iota1, 1.0 / b.exponent, b.sum, b.bound, threshold)};
  });

  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
  return failures == 0 ? 0 : 1;
}
