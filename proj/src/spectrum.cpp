#include "kamqho/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kamqho/errors.hpp"

namespace kamqho {

SpectrumModel::SpectrumModel(SpectrumKind kind, std::function<double(int)> rule, double c0,
                             double c1, double delta)
    : kind_(kind), rule_(std::move(rule)), c0_(c0), c1_(c1), delta_(delta) {
  if (!(c0 > 0.0) || !(c1 > 0.0) || !(delta > 0.0)) {
    throw DomainError("spectrum constants c0, c1, delta must be positive");
  }
}

SpectrumModel SpectrumModel::qho(double c0, double c1, double delta) {
  return {SpectrumKind::QHO, [](int i) { return 2.0 * i - 1.0; }, c0, c1, delta};
}

SpectrumModel SpectrumModel::custom(std::function<double(int)> rule, double c0, double c1,
                                    double delta) {
  if (!rule) throw DomainError("custom spectrum needs a rule");
  return {SpectrumKind::Custom, std::move(rule), c0, c1, delta};
}

double SpectrumModel::nu(int i) const {
  if (i < 1) throw DomainError("spectrum index must be >= 1, got " + std::to_string(i));
  return rule_(i);
}

H1Report verify_h1(const SpectrumModel& model, int N) {
  if (N < 2) throw DomainError("verify_h1 needs N >= 2");
  std::vector<double> nu(N + 2);
  for (int i = 1; i <= N + 1; ++i) nu[i] = model.nu(i);

  H1Report r;
  r.min_gap_ratio = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      if (i == j) continue;
      const double dist = std::abs(i - j);
      r.min_gap_ratio = std::min(r.min_gap_ratio, std::abs(nu[i] - nu[j]) / dist);
      const double diff = std::abs(nu[i + 1] - nu[i] + nu[j] - nu[j + 1]);
      const double weight = std::pow(static_cast<double>(i) * j, model.delta());
      r.max_diff_ratio = std::max(r.max_diff_ratio, diff * weight / dist);
    }
  }
  r.pass = r.min_gap_ratio >= model.c0() && r.max_diff_ratio <= model.c1();
  return r;
}

}  // namespace kamqho
