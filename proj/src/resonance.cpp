#include "kamqho/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "kamqho/errors.hpp"

namespace kamqho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// All k in [-K, K]^n with 0 < |k|; with `canonical` only one of each +-k pair.
std::vector<Mode> nonzero_modes(int n, int K, bool canonical) {
  std::vector<Mode> out;
  const int side = 2 * K + 1;
  int total = 1;
  for (int l = 0; l < n; ++l) total *= side;
  for (int idx = 0; idx < total; ++idx) {
    Mode k(n);
    int rem = idx;
    for (int l = 0; l < n; ++l) {
      k[l] = rem % side - K;
      rem /= side;
    }
    const auto first = std::find_if(k.begin(), k.end(), [](int c) { return c != 0; });
    if (first == k.end()) continue;
    if (canonical && *first < 0) continue;
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace

FrequencyRegion::FrequencyRegion(int n) : n_(n) {
  if (n < 1) throw DomainError("frequency dimension must be >= 1");
}

double FrequencyRegion::box_measure() const { return std::pow(kTwoPi, n_); }

bool FrequencyRegion::excluded(std::span<const double> omega) const {
  RVector lam;
  bool have_lambda = false;
  for (const auto& z : zones_) {
    double s = dot(z.k, omega);
    if (z.uses_lambda) {
      if (!have_lambda) {
        lam = lambda_(omega);
        have_lambda = true;
      }
      s += lam(z.i - 1) - lam(z.j - 1);
    } else {
      s += z.shift;
    }
    if (std::abs(s) < z.width) return true;
  }
  return false;
}

std::vector<std::vector<double>> FrequencyRegion::retained_samples(
    int count, const MeasureOptions& opts) const {
  std::mt19937_64 gen(opts.seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<std::vector<double>> out;
  std::vector<double> w(n_);
  const long long max_draws = 1000LL * std::max(count, 1);
  for (long long draw = 0; draw < max_draws && static_cast<int>(out.size()) < count; ++draw) {
    for (auto& c : w) c = u(gen);
    if (!excluded(w)) out.push_back(w);
  }
  return out;
}

MeasureEstimate FrequencyRegion::measure(const MeasureOptions& opts) const {
  if (opts.samples < 1) throw DomainError("Monte Carlo needs at least one sample");
  std::mt19937_64 gen(opts.seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> w(n_);
  long long hits = 0;
  for (int s = 0; s < opts.samples; ++s) {
    for (auto& c : w) c = u(gen);
    if (excluded(w)) ++hits;
  }
  MeasureEstimate m;
  const double p = static_cast<double>(hits) / opts.samples;
  m.value = p * box_measure();
  m.half_width = opts.z * std::sqrt(p * (1.0 - p) / opts.samples) * box_measure();
  m.samples = opts.samples;
  m.seed = opts.seed;
  const bool fixed = std::none_of(zones_.begin(), zones_.end(),
                                  [](const ResonanceZone& z) { return z.uses_lambda; });
  if (n_ == 1 && fixed) m.exact = exact_measure_1d();
  return m;
}

double FrequencyRegion::union_bound() const {
  double total = 0.0;
  for (const auto& z : zones_) {
    int kmax = 0;
    for (int v : z.k) kmax = std::max(kmax, std::abs(v));
    if (kmax == 0) return box_measure();
    total += 2.0 * z.width / kmax * std::pow(kTwoPi, n_ - 1);
  }
  return std::min(total, box_measure());
}

double FrequencyRegion::exact_measure_1d() const {
  if (n_ != 1) throw DomainError("exact interval measure needs n = 1");
  std::vector<std::pair<double, double>> iv;
  for (const auto& z : zones_) {
    if (z.uses_lambda) throw DomainError("exact interval measure needs fixed zones");
    const double k = z.k[0];
    const double c = -z.shift / k;
    const double h = z.width / std::abs(k);
    const double lo = std::max(0.0, c - h);
    const double hi = std::min(kTwoPi, c + h);
    if (hi > lo) iv.emplace_back(lo, hi);
  }
  std::sort(iv.begin(), iv.end());
  double total = 0.0;
  double cur_lo = 0.0, cur_hi = -1.0;
  for (const auto& [lo, hi] : iv) {
    if (lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return total;
}

int relevant_difference_bound(int n, int K, double g, double c0) {
  if (!(c0 > g)) throw DomainError("gap constant must exceed the divisor weight");
  return static_cast<int>(std::floor((kTwoPi * n * K + g) / (c0 - g)));
}

FrequencyRegion build_h2_region(const SpectrumModel& model, int n, double gamma, int K, int N_idx,
                                const MeasureOptions& opts) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (K < 1) throw DomainError("K must be >= 1");
  FrequencyRegion region(n);
  const auto modes = nonzero_modes(n, K, true);
  if (model.arithmetic()) {
    const int dmax = relevant_difference_bound(n, K, gamma, model.spacing());
    for (const auto& k : modes) {
      for (int d = -dmax; d <= dmax; ++d) {
        ResonanceZone z;
        z.k = k;
        z.i = d >= 0 ? 1 + d : 1;
        z.j = d >= 0 ? 1 : 1 - d;
        z.width = gamma * (1.0 + std::abs(d));
        z.shift = model.spacing() * d;
        region.add_zone(std::move(z));
      }
    }
  } else {
    if (N_idx < 1) throw DomainError("N_idx must be >= 1");
    const double reach = kTwoPi * n * K;
    for (const auto& k : modes) {
      region.add_zone({k, 1, 1, gamma, 0.0, false});
      for (int i = 1; i <= N_idx; ++i) {
        for (int j = 1; j <= N_idx; ++j) {
          if (i == j) continue;
          const double shift = model.nu(i) - model.nu(j);
          const double width = gamma * (1.0 + std::abs(i - j));
          if (std::abs(shift) <= reach + width) region.add_zone({k, i, j, width, shift, false});
        }
      }
    }
  }
  region.measured = region.measure(opts);
  return region;
}

double iota1(double beta, double tau1) { return beta / (beta + 1.0) * std::max(tau1, 1.0); }

double iota2(int n, double tau2) { return std::max(tau2, n + 1.0); }

DprimeRegion build_Dprime(const LambdaMap& lambda, const SpectrumModel& model, int n,
                          const DprimeParams& params, const MeasureOptions& opts) {
  const double g = params.gamma;
  const double beta = params.beta;
  if (!(g > 0.0) || !(beta > 0.0) || params.c < 0.0 || params.K < 1) {
    throw DomainError("D' needs gamma > 0, beta > 0, c >= 0 and K >= 1");
  }
  const double coupled = std::pow(g, 1.0 + 1.0 / beta);
  if (std::abs(params.kappa - coupled) > 1e-9 * coupled) {
    throw DomainError("D' needs kappa = gamma^(1 + 1/beta)");
  }
  const double c0 = model.c0();
  if (!(params.kappa <= g && g <= std::min(c0 / 4.0, 1.0))) {
    throw DomainError("D' needs 0 < kappa <= gamma <= min(c0/4, 1)");
  }
  if (params.c > std::min(c0 / 4.0, 0.25)) throw DomainError("D' needs c <= min(c0/4, 1/4)");

  DprimeRegion out{FrequencyRegion(n), {}, 0.0, 0.0, 0.0, 0, 0};
  out.window_j = static_cast<int>(std::floor(std::pow(params.c / g, 1.0 / (2.0 * beta))));
  out.window_d = relevant_difference_bound(n, params.K, params.kappa, c0 - params.c);
  const int need = out.window_j + out.window_d;

  // Closeness ||diag(lambda - nu)||_{alpha, beta} <= c at a few probe points.
  const NormParams np{beta, beta};
  for (double t : {0.0, 0.25, 0.5, 0.75}) {
    const std::vector<double> w(n, t * kTwoPi);
    const RVector lam = lambda(w);
    if (lam.size() < std::max(need, 1)) {
      throw DomainError("lambda map is shorter than the D' index window (" +
                        std::to_string(need) + ")");
    }
    RVector diff(lam.size());
    for (int i = 0; i < lam.size(); ++i) diff(i) = lam(i) - model.nu(i + 1);
    const double dist = decay_norm(DecayMatrix::diagonal(diff), NormKind::AlphaBeta, np);
    if (dist > params.c * (1.0 + 1e-12) + 1e-15) {
      throw DomainError("lambda lies outside the c-ball around the unperturbed spectrum");
    }
  }

  const FrequencyRegion h2 = build_h2_region(model, n, 2.0 * g, params.K, need + 1, opts);
  out.h2_part = h2.measured;
  for (const auto& z : h2.zones()) out.region.add_zone(z);

  RVector fixed;
  if (params.lambda_constant) fixed = lambda(std::vector<double>(n, 0.0));
  const auto modes = nonzero_modes(n, params.K, false);
  for (const auto& k : modes) {
    for (int j = 1; j <= out.window_j; ++j) {
      for (int i = j; i <= j + out.window_d; ++i) {
        ResonanceZone z;
        z.k = k;
        z.i = i;
        z.j = j;
        z.width = params.kappa * (1.0 + (i - j));
        if (params.lambda_constant) {
          z.shift = fixed(i - 1) - fixed(j - 1);
        } else {
          z.uses_lambda = true;
        }
        out.region.add_zone(std::move(z));
      }
    }
  }
  if (!params.lambda_constant) out.region.set_lambda(lambda);

  out.iota1 = iota1(beta, params.tau1);
  out.iota2 = iota2(n, params.tau2.value_or(n + 1.0));
  out.bound = std::pow(params.kappa, out.iota1) * std::pow(params.K, out.iota2);
  out.region.measured = out.region.measure(opts);
  return out;
}

MeasureReport interval_measure(const std::function<double(double)>& f, double varsigma,
                               double kappa, int cells) {
  if (!(varsigma > 0.0) || !(kappa > 0.0)) throw DomainError("need varsigma > 0 and kappa > 0");
  if (cells < 1) throw DomainError("need at least one cell");
  const double h = 1.0 / cells;
  MeasureReport r;
  r.bound = 2.0 * kappa / varsigma;
  r.min_derivative = std::numeric_limits<double>::infinity();
  double fa = f(0.0);
  for (int c = 0; c < cells; ++c) {
    const double fb = f((c + 1) * h);
    const double slope = fb - fa;
    r.min_derivative = std::min(r.min_derivative, std::abs(slope) / h);
    double lo, hi;
    if (slope == 0.0) {
      lo = 0.0;
      hi = std::abs(fa) <= kappa ? 1.0 : 0.0;
    } else {
      lo = (-kappa - fa) / slope;
      hi = (kappa - fa) / slope;
      if (lo > hi) std::swap(lo, hi);
      lo = std::max(lo, 0.0);
      hi = std::min(hi, 1.0);
    }
    if (hi > lo) r.measure += (hi - lo) * h;
    fa = fb;
  }
  if (r.min_derivative < varsigma * (1.0 - 1e-9)) {
    throw DomainError("derivative audit failed: |f'| drops to " + std::to_string(r.min_derivative));
  }
  r.pass = r.measure <= r.bound * (1.0 + 1e-12);
  return r;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs >= 2 paired points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!(x[t] > 0.0) || !(y[t] > 0.0)) throw DomainError("slope fit needs positive data");
    const double lx = std::log(x[t]);
    const double ly = std::log(y[t]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw DomainError("slope fit needs distinct x values");
  return (m * sxy - sx * sy) / den;
}

}  // namespace kamqho
