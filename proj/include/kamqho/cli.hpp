#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace kamqho {

struct ExperimentConfig {
  std::string potential = "cos_decay";
  /// Decay exponent of the "remark" potential.
  double mu = 1.0;
  /// Analyticity width of the potential in theta.
  double potential_sigma = 1.0;
  int n = 1;
  int N = 64;
  /// Fourier cutoff: of P for assemble/reduce, of the resonance zones for measure.
  int K = 2;
  double eps = 1e-3;
  /// Empty means: draw omega from the retained H2 region with `seed`.
  std::vector<double> omega = {1.0};
  double sigma = 0.9;
  double alpha = 1.0;
  double beta = 0.5;

  int max_steps = 4;
  double stop_tol = 1e-14;
  std::string kappa_mode = "working";
  double divisor_floor = 1e-10;

  double gamma = 0.01;
  int samples = 100000;
  std::uint64_t seed = 20240601;
  int norm_samples = 100;

  double T = 1000.0;
  double p = 2.0;
  std::string integrator = "magnus4";
  double integrator_tol = 1e-10;
  double sample_dt = 1.0;
  int initial_modes = 4;
  int exclude_top = 8;
  bool compare_reduced = true;

  /// Empty disables file output.
  std::string output_dir = "kamqho_out";
  std::string prefix = "kamqho";
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are a DomainError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Throws DomainError naming the first invalid field.
void validate(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// Subcommands assemble, reduce, measure, propagate, verify-norms, full.
/// Exit codes: 0 ok, 2 validation or usage error, 3 ResonantFrequency,
/// 4 NormBlowup, 1 any other failure. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kamqho
