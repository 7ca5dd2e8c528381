#pragma once

#include <functional>

namespace kamqho {

enum class SpectrumKind { QHO, Custom };

/// Unperturbed eigenvalue sequence nu_1 < nu_2 < ... together with the
/// constants (c0, c1, delta) it is claimed to satisfy.
///
/// The constants are never inferred; verify_h1 audits them on a finite window.
class SpectrumModel {
 public:
  /// nu_i = 2i - 1. Default constants c0 = c1 = delta = 1.
  static SpectrumModel qho(double c0 = 1.0, double c1 = 1.0, double delta = 1.0);
  static SpectrumModel custom(std::function<double(int)> rule, double c0, double c1,
                              double delta);

  [[nodiscard]] SpectrumKind kind() const { return kind_; }
  [[nodiscard]] double c0() const { return c0_; }
  [[nodiscard]] double c1() const { return c1_; }
  [[nodiscard]] double delta() const { return delta_; }

  /// nu_i for i >= 1; throws DomainError otherwise.
  [[nodiscard]] double nu(int i) const;

  /// True when nu_i - nu_j depends only on i - j (QHO), in which case
  /// `spacing()` is the common gap.
  [[nodiscard]] bool arithmetic() const { return kind_ == SpectrumKind::QHO; }
  [[nodiscard]] double spacing() const { return 2.0; }

 private:
  SpectrumModel(SpectrumKind kind, std::function<double(int)> rule, double c0, double c1,
                double delta);

  SpectrumKind kind_;
  std::function<double(int)> rule_;
  double c0_;
  double c1_;
  double delta_;
};

struct H1Report {
  /// min over i != j of |nu_i - nu_j| / |i - j|
  double min_gap_ratio = 0.0;
  /// max over i != j of |nu_{i+1} - nu_i + nu_j - nu_{j+1}| (ij)^delta / |i - j|
  double max_diff_ratio = 0.0;
  bool pass = false;
};

/// Audits both H1 inequalities for all 1 <= i, j <= N. Requires N >= 2.
H1Report verify_h1(const SpectrumModel& model, int N);

}  // namespace kamqho
