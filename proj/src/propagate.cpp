#include "kamqho/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "kamqho/errors.hpp"

namespace kamqho {

namespace {

constexpr Complex kI{0.0, 1.0};

class Generator {
 public:
  Generator(const RVector& A0, const FourierMatrixSeries& P0, double eps,
            std::span<const double> omega)
      : A0_(A0), P0_(P0), eps_(eps), omega_(omega.begin(), omega.end()), theta_(omega.size()) {}

  /// H(t) = diag(A0) + eps P(omega t)
  CMatrix operator()(double t) const {
    const int n = static_cast<int>(A0_.size());
    CMatrix h = CMatrix::Zero(n, n);
    if (eps_ != 0.0) {
      for (std::size_t l = 0; l < omega_.size(); ++l) {
        theta_[l] = std::remainder(omega_[l] * t, 2.0 * M_PI);
      }
      h = eps_ * synthesize_real(P0_, theta_);
      h = 0.5 * (h + h.adjoint()).eval();
      const double scale = h.cwiseAbs().maxCoeff();
      if (h.imag().cwiseAbs().maxCoeff() <= 1e-15 * scale) h = h.real().cast<Complex>();
    }
    for (int i = 0; i < n; ++i) h(i, i) += A0_(i);
    return h;
  }

  [[nodiscard]] bool constant() const { return eps_ == 0.0 || P0_.K() == 0; }

 private:
  RVector A0_;
  const FourierMatrixSeries& P0_;
  double eps_;
  std::vector<double> omega_;
  mutable std::vector<double> theta_;
};

/// exp(-i h H) v for hermitian H.
CVector apply_unitary(const CMatrix& H, double h, const CVector& v) {
  if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.real());
    const Eigen::MatrixXd& U = es.eigenvectors();
    CVector w = U.transpose().cast<Complex>() * v;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w(i) *= std::exp(-kI * (h * es.eigenvalues()(i)));
    }
    return U.cast<Complex>() * w;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const CMatrix& U = es.eigenvectors();
  CVector w = U.adjoint() * v;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) *= std::exp(-kI * (h * es.eigenvalues()(i)));
  }
  return U * w;
}

/// Commutator-free fourth-order Magnus step.
CVector magnus4_step(const Generator& H, double t, double h, const CVector& u) {
  static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  static const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
  static const double a2 = 0.25 - std::sqrt(3.0) / 6.0;
  const CMatrix H1 = H(t + c1 * h);
  const CMatrix H2 = H(t + c2 * h);
  const CVector v = apply_unitary(a1 * H1 + a2 * H2, h, u);
  return apply_unitary(a2 * H1 + a1 * H2, h, v);
}

struct StepResult {
  CVector u;
  double err = 0.0;
};

StepResult magnus_doubling(const Generator& H, double t, double h, const CVector& u) {
  const CVector full = magnus4_step(H, t, h, u);
  const CVector half = magnus4_step(H, t + 0.5 * h, 0.5 * h, magnus4_step(H, t, 0.5 * h, u));
  // Richardson: the two-step result is 16x more accurate at order 4.
  return {half, (half - full).norm() / 15.0};
}

StepResult dormand_prince(const Generator& H, double t, double h, const CVector& u) {
  auto f = [&](double s, const CVector& y) -> CVector { return -kI * (H(s) * y); };
  const CVector k1 = f(t, u);
  const CVector k2 = f(t + h / 5.0, u + h * (k1 / 5.0));
  const CVector k3 = f(t + 3.0 * h / 10.0, u + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
  const CVector k4 =
      f(t + 4.0 * h / 5.0, u + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
  const CVector k5 = f(t + 8.0 * h / 9.0,
                       u + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
  const CVector k6 = f(t + h, u + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                       46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                       5103.0 / 18656.0 * k5));
  const CVector y5 = u + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                              2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
  const CVector k7 = f(t + h, y5);
  const CVector y4 = u + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                              393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                              187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
  return {y5, (y5 - y4).norm()};
}

void validate_state(const StateVector& u0, int dim) {
  if (u0.size() != dim) throw DomainError("initial state has wrong dimension");
  if (std::abs(u0.norm() - 1.0) > 1e-12) throw DomainError("initial state must be normalized");
}

}  // namespace

double sobolev_norm(const StateVector& u, double p) {
  if (!std::isfinite(p)) throw DomainError("Sobolev index must be finite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    s += std::pow(static_cast<double>(i + 1), p) * std::norm(u(i));
  }
  return std::sqrt(s);
}

Trajectory integrate(const RVector& A0, const FourierMatrixSeries& P0, double eps,
                     std::span<const double> omega, const StateVector& u0, double T,
                     const IntegrateOptions& opts) {
  if (!(T > 0.0)) throw DomainError("integration time must be positive");
  if (!(opts.tol > 0.0) || !(opts.sample_dt > 0.0) || !(opts.dt_initial > 0.0)) {
    throw DomainError("integrator tolerances and steps must be positive");
  }
  if (P0.dim() != A0.size()) throw DomainError("A0 and P0 have different sizes");
  if (static_cast<int>(omega.size()) != P0.n()) throw DomainError("omega has wrong dimension");
  validate_state(u0, static_cast<int>(A0.size()));

  const Generator H(A0, P0, eps, omega);
  Trajectory traj;
  traj.t.push_back(0.0);
  traj.u.push_back(u0);
  const double norm0 = u0.norm();

  CVector u = u0;
  double t = 0.0;
  double h = std::min(opts.dt_initial, opts.dt_max);
  int next_sample = 1;
  const int n_samples = static_cast<int>(std::ceil(T / opts.sample_dt - 1e-9));
  const bool magnus = opts.method == Integrator::Magnus4;
  constexpr double order = 4.0;

  while (next_sample <= n_samples) {
    const double target = std::min(T, next_sample * opts.sample_dt);
    bool hit = false;
    double step = h;
    if (t + step >= target - 1e-12 * std::max(1.0, target)) {
      step = target - t;
      hit = true;
    }
    StepResult r;
    if (magnus && H.constant()) {
      r = {apply_unitary(H(t), step, u), 0.0};
    } else {
      r = magnus ? magnus_doubling(H, t, step, u) : dormand_prince(H, t, step, u);
    }
    const double err = r.err;
    if (err <= opts.tol) {
      t = hit ? target : t + step;
      u = std::move(r.u);
      ++traj.steps;
      traj.norm_drift = std::max(traj.norm_drift, std::abs(u.norm() - norm0));
      if (hit) {
        traj.t.push_back(t);
        traj.u.push_back(u);
        ++next_sample;
      }
      if (!hit) {
        const double grow = err > 0.0 ? 0.9 * std::pow(opts.tol / err, 1.0 / (order + 1.0)) : 5.0;
        h = std::min({opts.dt_max, step * std::clamp(grow, 0.2, 5.0)});
      }
    } else {
      ++traj.rejected;
      const double shrink = 0.9 * std::pow(opts.tol / err, 1.0 / (order + 1.0));
      h = step * std::clamp(shrink, 0.1, 0.9);
      if (h < opts.dt_min) {
        throw ConvergenceError("integrator step size underflow at t = " + std::to_string(t));
      }
    }
  }
  return traj;
}

Trajectory reduced_trajectory(const ReducibilityResult& result, const StateVector& u0,
                              std::span<const double> times) {
  const int dim = static_cast<int>(result.lambda_inf.size());
  validate_state(u0, dim);
  const int n = static_cast<int>(result.omega.size());
  std::vector<double> theta(n, 0.0);

  const CMatrix Phi0 = result.Phi.dim() == dim ? synthesize_real(result.Phi, theta)
                                                : CMatrix(CMatrix::Identity(dim, dim));
  const CVector v0 = Phi0.partialPivLu().solve(u0);

  Trajectory traj;
  for (double t : times) {
    CVector v = v0;
    for (int i = 0; i < dim; ++i) v(i) *= std::exp(-kI * (t * result.lambda_inf(i)));
    CVector u;
    if (t == 0.0) {
      u = u0;
    } else {
      for (int l = 0; l < n; ++l) theta[l] = std::remainder(result.omega[l] * t, 2.0 * M_PI);
      const CMatrix Phi = result.Phi.dim() == dim ? synthesize_real(result.Phi, theta)
                                                   : CMatrix(CMatrix::Identity(dim, dim));
      u = Phi * v;
    }
    traj.norm_drift = std::max(traj.norm_drift, std::abs(u.norm() - u0.norm()));
    traj.t.push_back(t);
    traj.u.push_back(std::move(u));
  }
  return traj;
}

DriftReport norm_drift_report(const Trajectory& traj, double p, double alpha, int exclude_top) {
  if (!(p >= 0.0) || !(p < 2.0 * alpha + 1.0)) {
    throw DomainError("Sobolev index p must lie in [0, 2 alpha + 1)");
  }
  DriftReport r;
  if (traj.u.empty()) return r;
  const Eigen::Index keep = std::max<Eigen::Index>(1, traj.u.front().size() - exclude_top);
  const double n0 = sobolev_norm(traj.u.front().head(keep), p);
  if (n0 == 0.0) throw DomainError("initial state vanishes on the reported modes");
  r.max_ratio = -std::numeric_limits<double>::infinity();
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const StateVector& u : traj.u) {
    const double ratio = sobolev_norm(u.head(keep), p) / n0;
    r.max_ratio = std::max(r.max_ratio, ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
  }
  return r;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.u.size(), b.u.size());
  double d = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    if (std::abs(a.t[s] - b.t[s]) > 1e-9 * std::max(1.0, std::abs(a.t[s]))) {
      throw DomainError("trajectories are sampled at different times");
    }
    d = std::max(d, (a.u[s] - b.u[s]).norm());
  }
  return d;
}

}  // namespace kamqho
