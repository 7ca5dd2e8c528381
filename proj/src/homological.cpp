#include "kamqho/homological.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kamqho/errors.hpp"

namespace kamqho {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_hermitian(const FourierMatrixSeries& P) {
  const double scale = std::max(1.0, P.max_abs());
  if (P.hermiticity_defect() > 1e-10 * scale) {
    throw DomainError("homological equation needs a hermitian perturbation");
  }
}

}  // namespace

HomologicalSolution solve_homological(const RVector& lambda, const FourierMatrixSeries& P,
                                      std::span<const double> omega, int K, double kappa,
                                      const HomologicalOptions& opts) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (K < 0) throw DomainError("cutoff K must be >= 0");
  if (static_cast<int>(omega.size()) != P.n()) throw DomainError("omega has wrong dimension");
  if (lambda.size() != P.dim()) throw DomainError("lambda and P have different sizes");
  require_hermitian(P);

  const int n = P.dim();
  const int k_eff = std::min(K, P.K());
  auto [head, tail] = split_tail(P, k_eff);

  HomologicalSolution sol;
  sol.R = std::move(tail);
  sol.R.set_hermitian(true);
  sol.B = FourierMatrixSeries(P.n(), k_eff, n, P.sigma(), false);
  sol.smallest_divisor = std::numeric_limits<double>::infinity();

  RVector a_diag(n);
  const CMatrix& mean = head.coeff_at(head.index(Mode(P.n(), 0)));
  for (int i = 0; i < n; ++i) a_diag(i) = mean(i, i).real();
  sol.A_tilde = DecayMatrix::diagonal(a_diag);

  for (int idx = 0; idx < head.mode_count(); ++idx) {
    const Mode k = head.mode(idx);
    const bool zero_mode = mode_norm(k) == 0;
    const double kw = dot(k, omega);
    const CMatrix& p = head.coeff_at(idx);
    CMatrix& b = sol.B.coeff_at(idx);
    const int r_idx = sol.R.index(k);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (zero_mode && i == j) continue;
        const Complex pij = p(i, j);
        if (std::abs(pij) <= opts.coupling_floor) {
          if (pij != Complex(0.0, 0.0)) {
            sol.R.coeff_at(r_idx)(i, j) += pij;
            ++sol.skipped;
          }
          continue;
        }
        const double div = kw + lambda(i) - lambda(j);
        const double normalized = std::abs(div) / (1.0 + std::abs(i - j));
        if (normalized < kappa && std::abs(pij) <= opts.defer_limit) {
          sol.R.coeff_at(r_idx)(i, j) += pij;
          ++sol.deferred;
          sol.max_deferred = std::max(sol.max_deferred, std::abs(pij));
          continue;
        }
        if (normalized < sol.smallest_divisor) {
          sol.smallest_divisor = normalized;
          sol.smallest_k = k;
          sol.smallest_i = i + 1;
          sol.smallest_j = j + 1;
        }
        if (normalized < kappa) {
          throw ResonantFrequency(k, i + 1, j + 1, std::abs(div), kappa * (1.0 + std::abs(i - j)));
        }
        b(i, j) = -pij / div;
      }
    }
  }

  if (opts.residual != ResidualMode::None) {
    const FourierMatrixSeries res = homological_residual(lambda, P, omega, sol);
    if (opts.residual == ResidualMode::Coefficients) {
      sol.residual = res.max_abs();
    } else {
      sol.residual = strip_norm(res, NormKind::AlphaBeta, opts.norm, 0.5 * res.sigma());
    }
  }
  return sol;
}

FourierMatrixSeries homological_residual(const RVector& lambda, const FourierMatrixSeries& P,
                                         std::span<const double> omega,
                                         const HomologicalSolution& sol) {
  const int kmax = std::max({P.K(), sol.B.K(), sol.R.K()});
  const int n = P.dim();
  FourierMatrixSeries res(P.n(), kmax, n, P.sigma(), false);
  const FourierMatrixSeries bdot = theta_time_derivative(sol.B, omega);
  for (int idx = 0; idx < sol.B.mode_count(); ++idx) {
    const CMatrix& b = sol.B.coeff_at(idx);
    CMatrix comm(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) comm(i, j) = (lambda(i) - lambda(j)) * b(i, j);
    }
    res.coeff_at(res.index(sol.B.mode(idx))) += comm - kI * bdot.coeff_at(idx);
  }
  res.coeff_at(res.index(Mode(P.n(), 0))) -= sol.A_tilde.mat();
  for (int idx = 0; idx < P.mode_count(); ++idx) {
    res.coeff_at(res.index(P.mode(idx))) += P.coeff_at(idx);
  }
  for (int idx = 0; idx < sol.R.mode_count(); ++idx) {
    res.coeff_at(res.index(sol.R.mode(idx))) -= sol.R.coeff_at(idx);
  }
  return res;
}

BoundReport key_lemma_check(const DecayMatrix& Q, const RVector& mu, const SpectrumModel& model,
                            std::span<const double> omega, const Mode& k, double kappa,
                            const NormParams& p, const KeyLemmaConstants& constants) {
  p.validate();
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const int n = Q.dim();
  if (mu.size() != n) throw DomainError("mu and Q have different sizes");
  const double kw = dot(k, omega);
  const bool zero_mode = mode_norm(k) == 0;

  std::ostringstream bad;
  int violations = 0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (zero_mode && i == j) continue;
      const double div = kw + mu(i - 1) - mu(j - 1);
      if (std::abs(div) < kappa * (1.0 + std::abs(i - j))) {
        if (violations < 8) bad << " divisor(" << i << "," << j << ")";
        ++violations;
      }
    }
  }
  for (int i = 1; i < n; ++i) {
    const double d = mu(i) - mu(i - 1) + model.nu(i) - model.nu(i + 1);
    if (std::abs(d) > constants.c_mu / std::pow(i, 2.0 * p.beta)) {
      if (violations < 8) bad << " difference(" << i << ")";
      ++violations;
    }
  }
  if (violations > 0) {
    throw DomainError("key lemma preconditions violated at" + bad.str() +
                      (violations > 8 ? " ..." : ""));
  }

  DecayMatrix B(n);
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= n; ++i) {
      if (zero_mode && i == j) continue;
      B.entry(i, j) = Q.entry(i, j) / (kw + mu(i - 1) - mu(j - 1));
    }
  }
  BoundReport r;
  r.bound = std::pow(2.0, p.beta + 1.0) * (constants.c_mu + constants.c1 + 1.0);
  r.lhs = norm_alpha_plus_beta(B, p);
  r.scale = norm_alpha_beta(Q, p) / (kappa * kappa);
  r.ratio = r.scale > 0.0 ? r.lhs / r.scale : 0.0;
  r.pass = r.ratio <= r.bound;
  return r;
}

DerivativeReport derivative_solution_check(const HomologicalFamily& family,
                                           std::span<const double> omega, int K, double kappa,
                                           double h, const HomologicalOptions& opts) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  HomologicalOptions quiet = opts;
  quiet.residual = ResidualMode::None;

  const auto [lam0, P0] = family(omega);
  const HomologicalSolution s0 = solve_homological(lam0, P0, omega, K, kappa, quiet);
  const int n = P0.dim();

  DerivativeReport rep;
  for (std::size_t l = 0; l < omega.size(); ++l) {
    std::vector<double> wp(omega.begin(), omega.end());
    std::vector<double> wm = wp;
    wp[l] += h;
    wm[l] -= h;
    const auto [lp, Pp] = family(wp);
    const auto [lm, Pm] = family(wm);
    const HomologicalSolution sp = solve_homological(lp, Pp, wp, K, kappa, quiet);
    const HomologicalSolution sm = solve_homological(lm, Pm, wm, K, kappa, quiet);

    const RVector dlam = (lp - lm) / (2.0 * h);
    FourierMatrixSeries dB = sp.B - sm.B;
    dB *= Complex(0.5 / h, 0.0);
    FourierMatrixSeries dP = Pp - Pm;
    dP *= Complex(0.5 / h, 0.0);
    const CMatrix dA = (sp.A_tilde.mat() - sm.A_tilde.mat()) / (2.0 * h);

    const CMatrix& dmean = dP.coeff_at(dP.index(Mode(dP.n(), 0)));
    for (int i = 0; i < n; ++i) {
      rep.residual = std::max(rep.residual, std::abs(dA(i, i) - Complex(dmean(i, i).real(), 0.0)));
    }
    for (int idx = 0; idx < s0.B.mode_count(); ++idx) {
      const Mode k = s0.B.mode(idx);
      const double kw = dot(k, omega);
      const CMatrix& b = s0.B.coeff_at(idx);
      const CMatrix& db = dB.coeff_at(dB.index(k));
      const int pidx = dP.index(k);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          if (b(i, j) == Complex(0.0, 0.0)) continue;
          const Complex dp = pidx >= 0 ? dP.coeff_at(pidx)(i, j) : Complex(0.0, 0.0);
          const Complex lhs = (k[l] + dlam(i) - dlam(j)) * b(i, j) +
                              (kw + lam0(i) - lam0(j)) * db(i, j) + dp;
          rep.residual = std::max(rep.residual, std::abs(lhs));
        }
      }
    }
    rep.dB = std::move(dB);
  }
  return rep;
}

}  // namespace kamqho
