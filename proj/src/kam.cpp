#include "kamqho/kam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "kamqho/errors.hpp"

namespace kamqho {

namespace {

constexpr Complex kI{0.0, 1.0};

RVector unperturbed(const SpectrumModel& model, int n) {
  RVector nu(n);
  for (int i = 0; i < n; ++i) nu(i) = model.nu(i + 1);
  return nu;
}

double shift_norm(const RVector& lambda, const RVector& lambda0, const NormParams& p) {
  return decay_norm(DecayMatrix::diagonal(lambda - lambda0), NormKind::AlphaBeta, p);
}

// Generators contribute modes up to their support; use it to seed grids.
int combined_support(std::span<const FourierMatrixSeries> gens, double rel) {
  int s = 0;
  for (const auto& g : gens) s += g.support(rel * g.max_abs());
  return s;
}

}  // namespace

KamSchedule::KamSchedule(double eps0, double sigma0) : eps0_(eps0), sigma0_(sigma0) {
  if (!(eps0 >= 0.0 && eps0 < 1.0)) throw DomainError("eps0 must lie in [0, 1)");
  if (!(sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
}

double KamSchedule::log_eps(int m) const {
  if (m < 0) throw DomainError("schedule index must be >= 0");
  if (eps0_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::pow(4.0 / 3.0, m) * std::log(eps0_);
}

double KamSchedule::eps(int m) const { return std::exp(log_eps(m)); }

double KamSchedule::kappa(int m) const {
  if (m < 1) throw DomainError("kappa_m is defined for m >= 1");
  return std::exp(log_eps(m - 1) / 16.0);
}

double KamSchedule::sigma(int m) const {
  double s = 0.0;
  for (int l = 1; l <= m; ++l) s += 1.0 / (static_cast<double>(l) * l);
  return sigma0_ - sigma0_ / (2.0 * kCStar) * s;
}

double KamSchedule::sigma_drop(int m) const {
  if (m < 1) throw DomainError("sigma drop is defined for m >= 1");
  return sigma0_ / (2.0 * kCStar) / (static_cast<double>(m) * m);
}

double KamSchedule::K_real(int m) const { return 2.0 / sigma_drop(m) * (-log_eps(m - 1)); }

int KamSchedule::K(int m) const {
  const double k = K_real(m);
  if (!std::isfinite(k) || k > 1e9) return 1;
  return std::max(1, static_cast<int>(std::floor(k)));
}

BudgetReport measure_budget(double eps0, double beta, double tau1) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("eps0 must lie in (0, 1)");
  BudgetReport r;
  r.iota1 = beta / (beta + 1.0) * std::max(tau1, 1.0);
  r.exponent = r.iota1 / 17.0;
  const double base = r.exponent * std::log(eps0);
  for (int m = 0; m < 5000; ++m) {
    const double t = std::exp(std::pow(4.0 / 3.0, m) * base);
    r.sum += t;
    r.terms = m + 1;
    if (t < 1e-300) break;
  }
  r.bound = 2.0 * std::exp(base);
  r.pass = r.sum <= r.bound;
  return r;
}

double budget_threshold(double exponent) {
  if (!(exponent > 0.0)) throw DomainError("exponent must be positive");
  // With a = eps0^x the condition reads sum_{m >= 1} a^{(4/3)^m - 1} <= 1.
  auto excess = [&](double log_eps0) {
    double s = 0.0;
    for (int m = 1; m < 5000; ++m) {
      const double t = std::exp((std::pow(4.0 / 3.0, m) - 1.0) * exponent * log_eps0);
      s += t;
      if (t < 1e-300) break;
    }
    return s - 1.0;
  };
  double lo = -1e6, hi = -1e-9;  // excess(lo) < 0 < excess(hi)
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) <= 0.0 ? lo : hi) = mid;
  }
  return std::exp(lo);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
  std::vector<double> x(order), w(order);
  for (int q = 0; q < order; ++q) {
    x[q] = 0.5 * (eig.eigenvalues()(q) + 1.0);
    const double v = eig.eigenvectors()(0, q);
    w[q] = v * v;
  }
  return {x, w};
}

KamState initial_state(const FourierMatrixSeries& P0, const SpectrumModel& model,
                       std::span<const double> omega, const KamSchedule& schedule,
                       const KamConfig& config) {
  config.norm.validate();
  if (static_cast<int>(omega.size()) != P0.n()) throw DomainError("omega has wrong dimension");
  if (!(schedule.sigma0() < P0.sigma())) {
    throw DomainError("sigma0 must be smaller than the analyticity width of P0");
  }
  KamState s;
  s.lambda0 = unperturbed(model, P0.dim());
  s.lambda = s.lambda0;
  s.P = P0;
  s.omega.assign(omega.begin(), omega.end());

  KamStepRecord rec;
  rec.eps_m = schedule.eps(0);
  rec.sigma_m = schedule.sigma(0);
  rec.K_used = P0.K();
  rec.norm_P = strip_norm(P0, NormKind::AlphaBeta, config.norm, schedule.sigma(0), config.sampling);
  rec.hermiticity = P0.hermiticity_defect();
  rec.within_schedule = rec.norm_P <= rec.eps_m;
  s.log.push_back(rec);
  return s;
}

KamState kam_step(const KamState& state, const KamSchedule& schedule, const KamConfig& config) {
  const int m = state.m;
  const int next = m + 1;
  const int dim = state.P.dim();
  const int K_cut = schedule.K(next);
  const double floor =
      config.kappa_mode == KappaMode::Schedule ? schedule.kappa(next) : config.divisor_floor;

  HomologicalOptions hopts;
  hopts.coupling_floor = std::max(config.coupling_floor_rel * state.P.max_abs(),
                                  config.roundoff_floor_rel * state.lambda.cwiseAbs().maxCoeff());
  hopts.defer_limit = config.defer_fraction * schedule.eps(next);
  hopts.residual = ResidualMode::Coefficients;
  hopts.norm = config.norm;
  HomologicalSolution sol = solve_homological(state.lambda, state.P, state.omega, K_cut, floor, hopts);

  const double sig_prev = schedule.sigma(m);
  const double sig_next = schedule.sigma(next);
  sol.B.set_sigma(sig_prev);
  sol.R.set_sigma(sig_prev);

  const CMatrix a_tilde = sol.A_tilde.mat();
  const bool has_tail = sol.R.max_abs() > 0.0;
  const auto [s8, w8] = gauss_legendre01(config.quad_order);
  std::vector<double> s12, w12;
  if (config.audit_order > 0) std::tie(s12, w12) = gauss_legendre01(config.audit_order);

  auto integral = [&](const CMatrix& b, const CMatrix& p, const CMatrix& r,
                      const std::vector<double>& nodes, const std::vector<double>& weights) {
    CMatrix acc = CMatrix::Zero(dim, dim);
    const CMatrix ar = a_tilde + r;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double s = nodes[q];
      const CMatrix x = (1.0 - s) * ar + s * p;
      CMatrix c = x * b;
      c.noalias() -= b * x;
      // B is anti-hermitian, so e^{-sB} = (e^{sB})^*.
      const CMatrix e = expm(s * b);
      acc += weights[q] * (e.adjoint() * c * e);
    }
    return acc;
  };

  double audit = 0.0;
  long long calls = 0;
  auto sampler = [&](std::span<const double> theta) -> CMatrix {
    const CMatrix b = synthesize_real(sol.B, theta);
    const CMatrix p = synthesize_real(state.P, theta);
    const CMatrix r = has_tail ? synthesize_real(sol.R, theta) : CMatrix::Zero(dim, dim);
    CMatrix f = r + integral(b, p, r, s8, w8);
    if (config.audit_order > 0 && calls % std::max(1, config.audit_stride) == 0) {
      const CMatrix g = r + integral(b, p, r, s12, w12);
      audit = std::max(audit, (f - g).cwiseAbs().maxCoeff());
    }
    ++calls;
    // The integrand is hermitian; drop the roundoff part that is not.
    return 0.5 * (f + f.adjoint());
  };

  const double rel = config.tail_tol;
  const int cap = std::max(1, std::min(config.max_grid_K, schedule.K(next + 1)));
  const int start = std::clamp(state.P.K() + sol.B.support(rel * sol.B.max_abs()), 1, cap);
  AdaptiveSeries next_P = analyze_adaptive(sampler, state.P.n(), start, cap, rel, sig_prev, true);

  KamState out;
  out.m = next;
  out.lambda0 = state.lambda0;
  out.lambda = state.lambda + a_tilde.diagonal().real();
  out.P = std::move(next_P.series);
  out.omega = state.omega;
  out.generators = state.generators;
  out.generators.push_back(sol.B);
  out.log = state.log;

  KamStepRecord rec;
  rec.m = next;
  rec.eps_m = schedule.eps(next);
  rec.kappa_m = schedule.kappa(next);
  rec.sigma_m = sig_next;
  rec.K_m = K_cut;
  rec.K_used = out.P.K();
  rec.grid_tail = next_P.tail;
  rec.norm_Atilde = decay_norm(sol.A_tilde, NormKind::AlphaBeta, config.norm);
  rec.norm_B = strip_norm(sol.B, NormKind::AlphaPlusBeta, config.norm, sig_next, config.sampling);
  rec.norm_P = strip_norm(out.P, NormKind::AlphaBeta, config.norm, sig_next, config.sampling);
  rec.min_divisor = sol.smallest_divisor;
  rec.skipped = sol.skipped;
  rec.deferred = sol.deferred;
  rec.max_deferred = sol.max_deferred;
  rec.homological_residual = sol.residual;
  rec.quad_audit = audit;
  rec.hermiticity = out.P.hermiticity_defect();
  rec.shift_norm = shift_norm(out.lambda, out.lambda0, config.norm);
  rec.within_schedule = rec.norm_P <= rec.eps_m;
  out.log.push_back(rec);

  if (!rec.within_schedule && config.throw_on_blowup) {
    throw NormBlowup(next, rec.norm_P, rec.eps_m);
  }
  return out;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged:
      return "converged";
    case RunStatus::MaxSteps:
      return "max_steps";
    case RunStatus::Blowup:
      return "blowup";
  }
  return "unknown";
}

ReducibilityResult run(const FourierMatrixSeries& P0, const SpectrumModel& model,
                       std::span<const double> omega, double eps0, double sigma0,
                       const KamConfig& config) {
  const KamSchedule schedule(eps0, sigma0);
  KamConfig cfg = config;
  cfg.throw_on_blowup = false;

  KamState state = initial_state(P0, model, omega, schedule, cfg);
  ReducibilityResult res;
  res.precondition_ok = state.log.front().within_schedule;
  bool converged = state.log.back().norm_P <= cfg.stop_tol;
  while (!converged && state.m < cfg.max_steps) {
    const double prev_norm = state.log.back().norm_P;
    state = kam_step(state, schedule, cfg);
    const auto& rec = state.log.back();
    if (!rec.within_schedule && res.blowup_step == 0) res.blowup_step = rec.m;
    converged = rec.norm_P <= cfg.stop_tol;
    // Off schedule and no longer contracting: further steps only amplify.
    if (!rec.within_schedule && !(rec.norm_P < prev_norm)) break;
  }

  res.status = res.blowup_step > 0 ? RunStatus::Blowup
               : converged         ? RunStatus::Converged
                                   : RunStatus::MaxSteps;
  res.lambda_inf = state.lambda;
  res.lambda0 = state.lambda0;
  res.omega = state.omega;
  res.generators = state.generators;
  res.log = state.log;
  res.final_norm_P = state.log.back().norm_P;
  res.max_shift = (state.lambda - state.lambda0).cwiseAbs().maxCoeff();
  res.Phi = transform_series(res.generators, P0.n(), P0.dim(), schedule.sigma(state.m), cfg);
  return res;
}

DecayMatrix compose_transform(std::span<const FourierMatrixSeries> generators,
                              std::span<const double> theta, int dim) {
  CMatrix phi = CMatrix::Identity(dim, dim);
  for (const auto& g : generators) {
    if (g.dim() != dim) throw DomainError("generator has wrong dimension");
    phi = phi * expm(synthesize_real(g, theta));
  }
  return DecayMatrix(std::move(phi), false);
}

FourierMatrixSeries transform_series(std::span<const FourierMatrixSeries> generators, int n,
                                     int dim, double sigma, const KamConfig& config) {
  if (generators.empty()) {
    return FourierMatrixSeries::constant(n, DecayMatrix::identity(dim), sigma);
  }
  auto sampler = [&](std::span<const double> theta) {
    return compose_transform(generators, theta, dim).mat();
  };
  const int cap = std::max(1, config.max_grid_K);
  const int start = std::clamp(combined_support(generators, config.tail_tol), 1, cap);
  return analyze_adaptive(sampler, n, start, cap, config.tail_tol, sigma, false).series;
}

ResidualReport reducibility_residual(const ReducibilityResult& result,
                                     const FourierMatrixSeries& P0, int points_per_dim) {
  const int dim = P0.dim();
  const int n = P0.n();
  const int m = points_per_dim > 0 ? points_per_dim
                                   : std::max(16, 2 * std::max(result.Phi.K(), P0.K()) + 2);
  const ThetaGrid grid(n, m);
  const FourierMatrixSeries dphi = theta_time_derivative(result.Phi, result.omega);

  std::vector<RVector> diags;
  std::vector<double> offs;
  diags.reserve(grid.size());
  for (int g = 0; g < grid.size(); ++g) {
    const auto th = grid.point(g);
    const CMatrix phi = synthesize_real(result.Phi, th);
    const CMatrix dp = synthesize_real(dphi, th);
    CMatrix h = synthesize_real(P0, th);
    h.diagonal() += result.lambda0.cast<Complex>();
    const CMatrix inv = phi.partialPivLu().inverse();
    const CMatrix q = inv * h * phi - kI * (inv * dp);
    double off = 0.0;
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) {
        if (i != j) off = std::max(off, std::abs(q(i, j)));
      }
    }
    offs.push_back(off);
    RVector d(dim);
    double imag = 0.0;
    for (int i = 0; i < dim; ++i) {
      d(i) = q(i, i).real();
      imag = std::max(imag, std::abs(q(i, i).imag()));
    }
    offs.back() += imag;
    diags.push_back(d);
  }
  RVector mean = RVector::Zero(dim);
  for (const auto& d : diags) mean += d;
  mean /= static_cast<double>(diags.size());

  ResidualReport r;
  for (std::size_t g = 0; g < diags.size(); ++g) {
    const double var = (diags[g] - mean).cwiseAbs().maxCoeff();
    const double vs = (diags[g] - result.lambda_inf).cwiseAbs().maxCoeff();
    r.off_diagonal = std::max(r.off_diagonal, offs[g]);
    r.diagonal_variation = std::max(r.diagonal_variation, var);
    r.diagonal_vs_lambda = std::max(r.diagonal_vs_lambda, vs);
    r.total = std::max(r.total, offs[g] + var + vs);
  }
  return r;
}

TransformReport transform_deviation(const FourierMatrixSeries& Phi, double p, int points_per_dim) {
  const int dim = Phi.dim();
  const int m = points_per_dim > 0 ? points_per_dim : std::max(16, 2 * Phi.K() + 2);
  const ThetaGrid grid(Phi.n(), m);
  TransformReport r;
  const CMatrix id = CMatrix::Identity(dim, dim);
  for (int g = 0; g < grid.size(); ++g) {
    const auto th = grid.point(g);
    const CMatrix phi = synthesize_real(Phi, th);
    r.deviation = std::max(r.deviation, weighted_operator_norm(phi - id, p, p));
    r.unitarity = std::max(r.unitarity, (phi.adjoint() * phi - id).cwiseAbs().maxCoeff());
  }
  return r;
}

}  // namespace kamqho
