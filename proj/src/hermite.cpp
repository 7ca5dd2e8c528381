#include "kamqho/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kamqho/errors.hpp"

namespace kamqho {

std::vector<double> hermite_functions(int count, double x) {
  if (count < 1) throw DomainError("hermite_functions needs count >= 1");
  std::vector<double> out(count);
  // Values are kept as scaled[k] * exp(log_scale[k]).
  std::vector<double> scaled(count);
  std::vector<double> log_scale(count);
  double scale = -0.5 * x * x;
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  scaled[0] = cur;
  log_scale[0] = scale;
  for (int k = 0; k + 1 < count; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150) {
      prev /= mag;
      cur /= mag;
      scale += std::log(mag);
    }
    scaled[k + 1] = cur;
    log_scale[k + 1] = scale;
  }
  for (int k = 0; k < count; ++k) {
    out[k] = scaled[k] == 0.0 ? 0.0 : scaled[k] * std::exp(log_scale[k]);
  }
  return out;
}

double eval_hermite(int i, double x) {
  if (i < 1) throw DomainError("Hermite index must be >= 1");
  return hermite_functions(i, x).back();
}

HermiteBasis::HermiteBasis(int N, int node_factor) : N_(N) {
  if (N < 1) throw DomainError("basis size must be >= 1");
  if (node_factor < 2) throw DomainError("need at least 2N quadrature nodes");
  const int q = node_factor * std::max(N, kMinNodeBase);

  // Golub-Welsch: eigenvalues of the Jacobi matrix of the weight e^{-x^2}.
  RVector diag = RVector::Zero(q);
  RVector sub(q - 1);
  for (int k = 1; k < q; ++k) sub(k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  nodes_ = eig.eigenvalues();

  // Newton polish on psi_Q, then symmetrize.
  for (int idx = 0; idx < q; ++idx) {
    double x = nodes_(idx);
    for (int it = 0; it < 3; ++it) {
      const auto psi = hermite_functions(q + 1, x);
      const double d = -x * psi[q] + std::sqrt(2.0 * q) * psi[q - 1];
      if (d == 0.0) break;
      x -= psi[q] / d;
    }
    nodes_(idx) = x;
  }
  for (int idx = 0; idx < q / 2; ++idx) {
    const double m = 0.5 * (nodes_(q - 1 - idx) - nodes_(idx));
    nodes_(idx) = -m;
    nodes_(q - 1 - idx) = m;
  }
  if (q % 2 == 1) nodes_(q / 2) = 0.0;

  weights_.resize(q);
  sampled_.resize(q, N);
  for (int idx = 0; idx < q; ++idx) {
    const auto psi = hermite_functions(std::max(q, N), nodes_(idx));
    const double last = psi[q - 1];
    weights_(idx) = 1.0 / (q * last * last);
    const double sw = std::sqrt(weights_(idx));
    for (int i = 0; i < N; ++i) sampled_(idx, i) = sw * psi[i];
  }
}

Eigen::MatrixXd HermiteBasis::gram() const { return sampled_.transpose() * sampled_; }

double HermiteBasis::gram_defect() const {
  return (gram() - Eigen::MatrixXd::Identity(N_, N_)).cwiseAbs().maxCoeff();
}

LadderReport ladder_check(const HermiteBasis& basis) {
  const int n = basis.size();
  const int q = basis.node_count();
  const int ext = n + 2;
  if (q < 2 * ext) throw DomainError("ladder_check needs at least 2(N + 2) nodes");

  // H(q, j) = h_{j+1}(x_q) for the extended range, and the projector onto it.
  Eigen::MatrixXd h(q, ext);
  for (int idx = 0; idx < q; ++idx) {
    const auto psi = hermite_functions(ext, basis.nodes()(idx));
    for (int j = 0; j < ext; ++j) h(idx, j) = psi[j];
  }
  const Eigen::MatrixXd proj = h.transpose() * basis.weights().asDiagonal();
  const RVector& x = basis.nodes();

  // d/dx h_j = sqrt((j-1)/2) h_{j-1} - sqrt(j/2) h_{j+1}  (1-based j)
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ext, ext);
  for (int j = 1; j <= ext; ++j) {
    if (j >= 2) d(j - 2, j - 1) = std::sqrt((j - 1) / 2.0);
    if (j + 1 <= ext) d(j, j - 1) = -std::sqrt(j / 2.0);
  }
  auto apply = [&](const RVector& samples, double sign) {
    const RVector c = proj * samples;
    const RVector xf = x.cwiseProduct(samples);
    return RVector(sign * (d * c) + proj * xf);
  };

  LadderReport r;
  for (int i = 1; i <= n - 1; ++i) {
    const RVector f = h.col(i - 1);
    const RVector t = apply(f, 1.0);
    const RVector td = apply(f, -1.0);
    RVector t_expected = RVector::Zero(ext);
    if (i >= 2) t_expected(i - 2) = std::sqrt(2.0 * (i - 1));
    RVector td_expected = RVector::Zero(ext);
    td_expected(i) = std::sqrt(2.0 * i);
    // T T^dagger h_i: synthesize T^dagger h_i on the nodes and apply T again.
    const RVector ttd = apply(h * td, 1.0);
    RVector ttd_expected = RVector::Zero(ext);
    ttd_expected(i - 1) = 2.0 * i;

    r.max_residual = std::max({r.max_residual, (t - t_expected).cwiseAbs().maxCoeff(),
                               (td - td_expected).cwiseAbs().maxCoeff(),
                               (ttd - ttd_expected).cwiseAbs().maxCoeff()});
    if (i == 1) r.t_dagger_h1 = td(1);
    if (i == 3) r.t_t_dagger_h3 = ttd(2);
  }
  return r;
}

PotentialSpec make_potential(const std::string& name, int n, double sigma, double mu) {
  if (n < 1) throw DomainError("torus dimension must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  PotentialSpec p;
  p.name = name;
  p.n = n;
  p.sigma = sigma;
  if (name == "zero") {
    p.c_bound = 0.0;
    p.v = [](double, std::span<const Complex>) { return Complex(0.0, 0.0); };
  } else if (name == "one") {
    p.c_bound = 1.0;
    p.v = [](double, std::span<const Complex>) { return Complex(1.0, 0.0); };
  } else if (name == "x") {
    p.audit_exempt = true;
    p.c_bound = 0.0;
    p.v = [](double x, std::span<const Complex>) { return Complex(x, 0.0); };
  } else if (name == "cos_decay") {
    p.c_bound = std::cosh(sigma);
    p.v = [](double x, std::span<const Complex> th) {
      return std::cos(th[0]) / std::sqrt(1.0 + x * x);
    };
  } else if (name == "remark") {
    if (!(mu > 0.0)) throw DomainError("remark potential needs mu > 0");
    p.c_bound = std::pow(std::cosh(sigma), n) * std::max(1.0, mu);
    p.v = [mu](double x, std::span<const Complex> th) {
      Complex g(1.0, 0.0);
      for (const auto& t : th) g *= std::cos(t);
      return g * std::pow(1.0 + x * x, -0.5 * mu);
    };
  } else {
    throw DomainError("unknown potential '" + name + "'");
  }
  return p;
}

AuditReport audit_potential(const PotentialSpec& pot) {
  std::vector<double> xs;
  for (int m = 0; m <= 200; ++m) xs.push_back(-20.0 + 0.2 * m);
  for (double t : {50.0, 100.0}) {
    xs.push_back(t);
    xs.push_back(-t);
  }
  const ThetaGrid grid(pot.n, 16);
  const double y = 0.9 * pot.sigma;
  AuditReport r;
  r.exempt = pot.audit_exempt;
  std::vector<Complex> theta(pot.n);
  for (int g = 0; g < grid.size(); ++g) {
    const auto re = grid.point(g);
    for (double im : {0.0, y, -y}) {
      for (int l = 0; l < pot.n; ++l) theta[l] = Complex(re[l], im);
      for (double x : xs) {
        const Complex v = pot.v(x, theta);
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const Complex dv = (pot.v(x + h, theta) - pot.v(x - h, theta)) / (2.0 * h);
        r.max_v = std::max(r.max_v, std::abs(v));
        r.max_x_dv = std::max(r.max_x_dv, std::abs(x * dv));
        if (im == 0.0) r.max_imag_real_theta = std::max(r.max_imag_real_theta, std::abs(v.imag()));
      }
    }
  }
  // Finite differences carry a relative error of order h^2; allow for it.
  const double slack = 1e-8 * std::max(1.0, pot.c_bound);
  r.pass = r.max_v <= pot.c_bound + slack && r.max_x_dv <= pot.c_bound + slack &&
           r.max_imag_real_theta <= 1e-14;
  return r;
}

namespace {

CMatrix assemble_raw(const HermiteBasis& basis, const PotentialSpec& pot,
                     std::span<const Complex> theta) {
  const auto& g = basis.sampled();
  const int q = basis.node_count();
  Eigen::VectorXcd v(q);
  for (int idx = 0; idx < q; ++idx) v(idx) = pot.v(basis.nodes()(idx), theta);
  const CMatrix gc = g.cast<Complex>();
  CMatrix p = gc.transpose() * v.asDiagonal() * gc;
  // Exact symmetry: P_ij and P_ji are the same integral.
  return 0.5 * (p + p.transpose());
}

}  // namespace

DecayMatrix assemble_P(const HermiteBasis& basis, const PotentialSpec& pot,
                       std::span<const Complex> theta, const HermiteBasis* check, double tol) {
  if (static_cast<int>(theta.size()) != pot.n) throw DomainError("theta has wrong dimension");
  double im = 0.0;
  for (const auto& t : theta) im = std::max(im, std::abs(t.imag()));
  if (im > 0.0 && !(im < pot.sigma)) throw DomainError("theta outside the strip |Im theta| < sigma");

  CMatrix p = assemble_raw(basis, pot, theta);
  if (im == 0.0) p = p.real().cast<Complex>();
  if (check != nullptr) {
    if (check->size() < basis.size()) throw DomainError("check basis is smaller than the basis");
    const CMatrix fine = assemble_raw(*check, pot, theta).topLeftCorner(basis.size(), basis.size());
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    const double change = (p - fine).cwiseAbs().maxCoeff();
    if (change > tol * scale) {
      throw AccuracyError("quadrature not converged: entries move by " + std::to_string(change) +
                          " between node counts");
    }
  }
  return DecayMatrix(std::move(p), im == 0.0);
}

DecayMatrix assemble_P(const HermiteBasis& basis, const PotentialSpec& pot,
                       std::span<const double> theta, const HermiteBasis* check, double tol) {
  std::vector<Complex> th(theta.begin(), theta.end());
  return assemble_P(basis, pot, std::span<const Complex>(th), check, tol);
}

DecayReport verify_P_decay(std::span<const DecayMatrix> samples, const NormParams& p) {
  DecayReport r;
  for (const auto& s : samples) {
    const auto& m = s.mat();
    const int n = s.dim();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double a = std::pow(1.0 + std::abs(i - j), p.alpha) * std::abs(m(i, j));
        if (a > r.c_alpha) {
          r.c_alpha = a;
          r.alpha_i = i + 1;
          r.alpha_j = j + 1;
        }
        if (i < n - 1 && j < n - 1) {
          const double b = std::pow((i + 1.0) * (j + 1.0), p.beta) *
                           std::abs(m(i + 1, j + 1) - m(i, j));
          if (b > r.c_beta) {
            r.c_beta = b;
            r.beta_i = i + 1;
            r.beta_j = j + 1;
          }
        }
      }
    }
  }
  return r;
}

FourierMatrixSeries perturbation_series(const HermiteBasis& basis, const PotentialSpec& pot,
                                        int K) {
  const ThetaGrid grid = ThetaGrid::for_cutoff(pot.n, K);
  std::vector<CMatrix> samples;
  samples.reserve(grid.size());
  for (int g = 0; g < grid.size(); ++g) {
    const auto th = grid.point(g);
    samples.push_back(assemble_P(basis, pot, std::span<const double>(th)).mat());
  }
  return analyze(std::span<const CMatrix>(samples), grid, K, pot.sigma, true);
}

}  // namespace kamqho
