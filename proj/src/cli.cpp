#include "kamqho/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "kamqho/decay_matrix.hpp"
#include "kamqho/errors.hpp"
#include "kamqho/fourier.hpp"
#include "kamqho/hermite.hpp"
#include "kamqho/kam.hpp"
#include "kamqho/propagate.hpp"
#include "kamqho/resonance.hpp"
#include "kamqho/spectrum.hpp"

namespace kamqho {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586;

const char* const kCommands[] = {"assemble", "reduce", "measure", "propagate", "verify-norms",
                                 "full"};

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::vector<double> parse_omega(const std::string& text) {
  if (text == "sample") return {};
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DomainError("cannot parse omega entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("omega is empty");
  return out;
}

class Output {
 public:
  Output(const ExperimentConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)), hash_(config_hash(cfg)) {
    if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);
  }

  [[nodiscard]] const std::string& hash() const { return hash_; }

  json record() const {
    return json{{"command", command_}, {"config_hash", hash_}, {"seed", cfg_.seed}};
  }

  /// Writes a CSV table with config_hash and seed appended to every row.
  void csv(const std::string& table, const std::vector<std::string>& columns,
           const std::vector<std::vector<std::string>>& rows) const {
    if (cfg_.output_dir.empty()) return;
    std::ofstream f(path(table + ".csv"));
    if (!f) throw std::runtime_error("cannot write " + path(table + ".csv"));
    for (const auto& c : columns) f << c << ',';
    f << "config_hash,seed\n";
    for (const auto& r : rows) {
      for (const auto& v : r) f << v << ',';
      f << hash_ << ',' << cfg_.seed << '\n';
    }
  }

  void summary(const json& j) const {
    if (cfg_.output_dir.empty()) return;
    std::ofstream f(path(command_ + ".json"));
    if (!f) throw std::runtime_error("cannot write " + path(command_ + ".json"));
    f << j.dump(2) << '\n';
  }

 private:
  [[nodiscard]] std::string path(const std::string& leaf) const {
    return (std::filesystem::path(cfg_.output_dir) / (cfg_.prefix + "_" + leaf)).string();
  }

  const ExperimentConfig& cfg_;
  std::string command_;
  std::string hash_;
};

NormParams norm_params(const ExperimentConfig& c) { return NormParams{c.alpha, c.beta}; }

FourierMatrixSeries assemble_series(const ExperimentConfig& c, const HermiteBasis& basis) {
  const PotentialSpec pot = make_potential(c.potential, c.n, c.potential_sigma, c.mu);
  FourierMatrixSeries s = perturbation_series(basis, pot, c.K);
  return s.with_cutoff(s.support(1e-15 * std::max(1.0, s.max_abs())));
}

std::vector<double> resolve_omega(const ExperimentConfig& c) {
  if (!c.omega.empty()) return c.omega;
  const FrequencyRegion region = build_h2_region(SpectrumModel::qho(), c.n, c.gamma, std::max(1, c.K));
  MeasureOptions mo;
  mo.samples = c.samples;
  mo.seed = c.seed;
  auto draws = region.retained_samples(1, mo);
  if (draws.empty()) throw DomainError("no retained frequency found for omega = sample");
  return draws.front();
}

KamConfig kam_config(const ExperimentConfig& c) {
  KamConfig k;
  k.norm = norm_params(c);
  k.max_steps = c.max_steps;
  k.stop_tol = c.stop_tol;
  k.kappa_mode = c.kappa_mode == "schedule" ? KappaMode::Schedule : KappaMode::Working;
  k.divisor_floor = c.divisor_floor;
  return k;
}

json do_assemble(const ExperimentConfig& c, const Output& o) {
  const HermiteBasis basis(c.N);
  const PotentialSpec pot = make_potential(c.potential, c.n, c.potential_sigma, c.mu);
  const AuditReport audit = audit_potential(pot);
  const LadderReport ladder = ladder_check(basis);
  const FourierMatrixSeries s = assemble_series(c, basis);

  const ThetaGrid grid(c.n, c.n <= 2 ? 16 : 4);
  std::vector<DecayMatrix> samples;
  samples.reserve(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    samples.emplace_back(synthesize_real(s, grid.point(q)), true);
  }
  const DecayReport d = verify_P_decay(samples, norm_params(c));

  json j = o.record();
  j["basis"] = {{"N", c.N}, {"nodes", basis.node_count()}, {"gram_defect", basis.gram_defect()}};
  j["ladder"] = {{"max_residual", ladder.max_residual}};
  j["audit"] = {{"max_v", audit.max_v},
                {"max_x_dv", audit.max_x_dv},
                {"exempt", audit.exempt},
                {"pass", audit.pass}};
  j["series"] = {{"K", s.K()}, {"max_abs", s.max_abs()}, {"hermiticity", s.hermiticity_defect()}};
  j["decay"] = {{"c_alpha", d.c_alpha},
                {"c_beta", d.c_beta},
                {"alpha_at", {d.alpha_i, d.alpha_j}},
                {"beta_at", {d.beta_i, d.beta_j}}};
  return j;
}

struct ReduceOutcome {
  json summary;
  ReducibilityResult result;
  FourierMatrixSeries P0;
};

ReduceOutcome do_reduce(const ExperimentConfig& c, const Output& o, std::ostream& out) {
  const HermiteBasis basis(c.N);
  FourierMatrixSeries P0 = assemble_series(c, basis);
  P0 *= Complex(c.eps, 0.0);
  const std::vector<double> omega = resolve_omega(c);
  const ReducibilityResult r =
      run(P0, SpectrumModel::qho(), omega, c.eps, c.sigma, kam_config(c));

  out << "   m        eps_m      kappa_m  sigma_m      K_m  norm_Atilde       norm_B       norm_P"
         "  min_divisor\n";
  std::vector<std::vector<std::string>> rows;
  json steps = json::array();
  for (const KamStepRecord& s : r.log) {
    out << std::setw(4) << s.m << std::scientific << std::setprecision(4) << std::setw(13)
        << s.eps_m << std::setw(13) << s.kappa_m << std::fixed << std::setw(9) << s.sigma_m
        << std::setw(9) << s.K_m << std::scientific << std::setw(13) << s.norm_Atilde
        << std::setw(13) << s.norm_B << std::setw(13) << s.norm_P << std::setw(13)
        << s.min_divisor << '\n'
        << std::defaultfloat;
    rows.push_back({std::to_string(s.m), csv_num(s.eps_m), csv_num(s.kappa_m), csv_num(s.sigma_m),
                    std::to_string(s.K_m), csv_num(s.norm_Atilde), csv_num(s.norm_B),
                    csv_num(s.norm_P), csv_num(s.min_divisor)});
    steps.push_back({{"m", s.m},
                     {"eps_m", s.eps_m},
                     {"kappa_m", finite_or_null(s.kappa_m)},
                     {"sigma_m", s.sigma_m},
                     {"K_m", s.K_m},
                     {"K_used", s.K_used},
                     {"norm_Atilde", s.norm_Atilde},
                     {"norm_B", s.norm_B},
                     {"norm_P", s.norm_P},
                     {"min_divisor", finite_or_null(s.min_divisor)},
                     {"deferred", s.deferred},
                     {"homological_residual", s.homological_residual},
                     {"within_schedule", s.within_schedule}});
  }
  o.csv("kam_log",
        {"m", "eps_m", "kappa_m", "sigma_m", "K_m", "norm_Atilde", "norm_B", "norm_P",
         "min_divisor"},
        rows);

  const ResidualReport res = reducibility_residual(r, P0);
  const TransformReport t0 = transform_deviation(r.Phi, 0.0);
  const TransformReport t2 = transform_deviation(r.Phi, 2.0);
  json j = o.record();
  j["omega"] = omega;
  j["status"] = to_string(r.status);
  j["blowup_step"] = r.blowup_step;
  j["precondition_ok"] = r.precondition_ok;
  j["steps"] = steps;
  j["final_norm_P"] = r.final_norm_P;
  j["max_shift"] = r.max_shift;
  j["residual"] = {{"off_diagonal", res.off_diagonal},
                   {"diagonal_variation", res.diagonal_variation},
                   {"diagonal_vs_lambda", res.diagonal_vs_lambda},
                   {"total", res.total}};
  j["transform"] = {{"deviation_p0", t0.deviation},
                    {"deviation_p2", t2.deviation},
                    {"unitarity", std::max(t0.unitarity, t2.unitarity)}};
  std::vector<double> lam(r.lambda_inf.data(), r.lambda_inf.data() + r.lambda_inf.size());
  j["lambda_inf"] = lam;
  return {j, r, P0};
}

json do_measure(const ExperimentConfig& c, const Output& o) {
  MeasureOptions mo;
  mo.samples = c.samples;
  mo.seed = c.seed;
  const FrequencyRegion region = build_h2_region(SpectrumModel::qho(), c.n, c.gamma, c.K, 64, mo);
  const MeasureEstimate m = region.measure(mo);
  const double bound = region.union_bound();
  o.csv("region", {"samples", "measure", "bound"},
        {{std::to_string(m.samples), csv_num(m.value), csv_num(bound)}});
  json j = o.record();
  j["gamma"] = c.gamma;
  j["K"] = c.K;
  j["n"] = c.n;
  j["zones"] = region.zones().size();
  j["box_measure"] = region.box_measure();
  j["measure"] = m.value;
  j["half_width"] = m.half_width;
  j["samples"] = m.samples;
  j["bound"] = bound;
  if (m.exact) {
    j["exact"] = *m.exact;
    j["agrees"] = std::abs(*m.exact - m.value) <= m.half_width;
  }
  return j;
}

json do_propagate(const ExperimentConfig& c, const Output& o, std::ostream& out) {
  const HermiteBasis basis(c.N);
  const FourierMatrixSeries P = assemble_series(c, basis);
  const std::vector<double> omega = resolve_omega(c);
  RVector A0(c.N);
  const SpectrumModel model = SpectrumModel::qho();
  for (int i = 0; i < c.N; ++i) A0(i) = model.nu(i + 1);
  StateVector u0 = StateVector::Zero(c.N);
  for (int i = 0; i < c.initial_modes; ++i) u0(i) = 1.0;
  u0.normalize();

  IntegrateOptions io;
  io.method = c.integrator == "rk45" ? Integrator::RK45 : Integrator::Magnus4;
  io.tol = c.integrator_tol;
  io.sample_dt = c.sample_dt;
  const Trajectory tr = integrate(A0, P, c.eps, omega, u0, c.T, io);
  const DriftReport d = norm_drift_report(tr, c.p, c.alpha, c.exclude_top);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> modes;
  const Eigen::Index keep = c.N - c.exclude_top;
  for (std::size_t s = 0; s < tr.t.size(); ++s) {
    rows.push_back({csv_num(tr.t[s]), csv_num(sobolev_norm(tr.u[s], 0.0)),
                    csv_num(sobolev_norm(tr.u[s].head(keep), c.p))});
    std::vector<std::string> m{csv_num(tr.t[s])};
    for (int i = 0; i < c.N; ++i) m.push_back(csv_num(std::abs(tr.u[s](i))));
    modes.push_back(std::move(m));
  }
  o.csv("trajectory", {"t", "norm_l0", "norm_lp"}, rows);
  std::vector<std::string> mode_cols{"t"};
  for (int i = 1; i <= c.N; ++i) mode_cols.push_back("xi_" + std::to_string(i));
  o.csv("modes", mode_cols, modes);

  json j = o.record();
  j["omega"] = omega;
  j["T"] = c.T;
  j["steps"] = tr.steps;
  j["rejected"] = tr.rejected;
  j["norm_drift"] = tr.norm_drift;
  j["p"] = c.p;
  j["max_ratio"] = d.max_ratio;
  j["min_ratio"] = d.min_ratio;
  j["fitted_C"] =
      c.eps > 0.0 ? json(std::max(d.max_ratio - 1.0, 1.0 - d.min_ratio) / c.eps) : json(nullptr);
  if (c.compare_reduced) {
    ExperimentConfig rc = c;
    rc.omega = omega;
    rc.output_dir.clear();
    std::ostringstream sink;
    const ReduceOutcome red = do_reduce(rc, Output(rc, "reduce"), sink);
    const Trajectory rt = reduced_trajectory(red.result, u0, tr.t);
    j["reduced"] = {{"status", to_string(red.result.status)},
                    {"residual", red.summary["residual"]["total"]},
                    {"distance", trajectory_distance(tr, rt)}};
  }
  out << "propagate: T = " << c.T << ", steps = " << tr.steps << ", l0 drift = " << tr.norm_drift
      << ", l_p ratio in [" << d.min_ratio << ", " << d.max_ratio << "]\n";
  return j;
}

json do_verify_norms(const ExperimentConfig& c, const Output& o) {
  const NormParams p = norm_params(c);
  json j = o.record();
  json suites = json::array();
  for (int size : {16, 32}) {
    const AlgebraConstants a = algebra_constants(size, c.norm_samples, c.seed, p);
    suites.push_back({{"N", size},
                      {"samples", a.samples},
                      {"plus_product", a.plus_product},
                      {"left_product", a.left_product},
                      {"right_product", a.right_product},
                      {"op_plus", a.op_plus},
                      {"op_cases", a.op_cases}});
  }
  j["algebra"] = suites;
  const H1Report h1 = verify_h1(SpectrumModel::qho(), c.N);
  j["h1"] = {{"min_gap_ratio", h1.min_gap_ratio},
             {"max_diff_ratio", h1.max_diff_ratio},
             {"pass", h1.pass}};
  return j;
}

void bind_options(CLI::App* app, ExperimentConfig& c, std::string& omega_text, std::string& config_path) {
  app->add_option("--config", config_path, "JSON configuration file (flags override it)");
  app->add_option("--potential", c.potential, "zero, one, x, cos_decay or remark");
  app->add_option("--mu", c.mu, "decay exponent of the remark potential");
  app->add_option("--potential-sigma", c.potential_sigma, "analyticity width of the potential");
  app->add_option("--n", c.n, "number of frequencies");
  app->add_option("--N", c.N, "Hermite truncation size");
  app->add_option("--K", c.K, "Fourier cutoff");
  app->add_option("--eps", c.eps, "perturbation size");
  app->add_option("--omega", omega_text, "comma-separated frequencies or 'sample'");
  app->add_option("--sigma", c.sigma, "initial strip width sigma0");
  app->add_option("--alpha", c.alpha, "off-diagonal decay exponent");
  app->add_option("--beta", c.beta, "difference decay exponent");
  app->add_option("--max-steps", c.max_steps, "KAM steps");
  app->add_option("--stop-tol", c.stop_tol, "stop once ||P_m|| falls below this");
  app->add_option("--kappa-mode", c.kappa_mode, "working or schedule");
  app->add_option("--divisor-floor", c.divisor_floor, "working small-divisor floor");
  app->add_option("--gamma", c.gamma, "H2 resonance width");
  app->add_option("--samples", c.samples, "Monte Carlo samples");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--norm-samples", c.norm_samples, "matrix pairs per algebra suite");
  app->add_option("--T", c.T, "final time");
  app->add_option("--p", c.p, "Sobolev index of the reported norm");
  app->add_option("--integrator", c.integrator, "magnus4 or rk45");
  app->add_option("--integrator-tol", c.integrator_tol, "local error per step");
  app->add_option("--sample-dt", c.sample_dt, "trajectory sample spacing");
  app->add_option("--initial-modes", c.initial_modes, "u0 = normalized e_1 + ... + e_m");
  app->add_option("--exclude-top", c.exclude_top, "top modes left out of norm ratios");
  app->add_option("--compare-reduced", c.compare_reduced, "also evaluate the reduced flow");
  app->add_option("--output-dir", c.output_dir, "directory for JSON and CSV output ('' disables)");
  app->add_option("--prefix", c.prefix, "file name prefix");
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t a = 0; a < args.size(); ++a) {
    if (args[a] == "--config" && a + 1 < args.size()) return args[a + 1];
    if (args[a].rfind("--config=", 0) == 0) return args[a].substr(9);
  }
  return {};
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return json{{"potential", c.potential},
              {"mu", c.mu},
              {"potential_sigma", c.potential_sigma},
              {"n", c.n},
              {"N", c.N},
              {"K", c.K},
              {"eps", c.eps},
              {"omega", c.omega.empty() ? json("sample") : json(c.omega)},
              {"sigma", c.sigma},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"max_steps", c.max_steps},
              {"stop_tol", c.stop_tol},
              {"kappa_mode", c.kappa_mode},
              {"divisor_floor", c.divisor_floor},
              {"gamma", c.gamma},
              {"samples", c.samples},
              {"seed", c.seed},
              {"norm_samples", c.norm_samples},
              {"T", c.T},
              {"p", c.p},
              {"integrator", c.integrator},
              {"integrator_tol", c.integrator_tol},
              {"sample_dt", c.sample_dt},
              {"initial_modes", c.initial_modes},
              {"exclude_top", c.exclude_top},
              {"compare_reduced", c.compare_reduced},
              {"output_dir", c.output_dir},
              {"prefix", c.prefix}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("configuration must be a JSON object");
  ExperimentConfig c;
  const json defaults = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw DomainError("unknown configuration key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("potential", c.potential);
    get("mu", c.mu);
    get("potential_sigma", c.potential_sigma);
    get("n", c.n);
    get("N", c.N);
    get("K", c.K);
    get("eps", c.eps);
    if (j.contains("omega")) {
      const json& w = j.at("omega");
      if (w.is_string()) {
        c.omega = parse_omega(w.get<std::string>());
      } else if (w.is_number()) {
        c.omega = {w.get<double>()};
      } else {
        c.omega = w.get<std::vector<double>>();
      }
    }
    get("sigma", c.sigma);
    get("alpha", c.alpha);
    get("beta", c.beta);
    get("max_steps", c.max_steps);
    get("stop_tol", c.stop_tol);
    get("kappa_mode", c.kappa_mode);
    get("divisor_floor", c.divisor_floor);
    get("gamma", c.gamma);
    get("samples", c.samples);
    get("seed", c.seed);
    get("norm_samples", c.norm_samples);
    get("T", c.T);
    get("p", c.p);
    get("integrator", c.integrator);
    get("integrator_tol", c.integrator_tol);
    get("sample_dt", c.sample_dt);
    get("initial_modes", c.initial_modes);
    get("exclude_top", c.exclude_top);
    get("compare_reduced", c.compare_reduced);
    get("output_dir", c.output_dir);
    get("prefix", c.prefix);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open configuration file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError("invalid configuration: " + what);
  };
  require(c.n >= 1 && c.n <= 4, "n must be in 1..4");
  require(c.N >= 2 && c.N <= 512, "N must be in 2..512");
  require(c.K >= 0 && c.K <= 64, "K must be in 0..64");
  require(std::isfinite(c.eps) && c.eps >= 0.0 && c.eps < 1.0, "eps must be in [0, 1)");
  require(c.omega.empty() || static_cast<int>(c.omega.size()) == c.n,
          "omega must have n entries");
  for (double w : c.omega) require(std::isfinite(w), "omega must be finite");
  require(c.potential_sigma > 0.0 && std::isfinite(c.potential_sigma),
          "potential_sigma must be positive");
  require(c.sigma > 0.0 && c.sigma < c.potential_sigma, "sigma must be in (0, potential_sigma)");
  require(c.mu > 0.0, "mu must be positive");
  require(c.beta > 0.0 && c.beta <= c.alpha, "need 0 < beta <= alpha");
  require(c.max_steps >= 0, "max_steps must be >= 0");
  require(c.stop_tol >= 0.0, "stop_tol must be >= 0");
  require(c.kappa_mode == "working" || c.kappa_mode == "schedule",
          "kappa_mode must be working or schedule");
  require(c.divisor_floor > 0.0, "divisor_floor must be positive");
  require(c.gamma > 0.0 && c.gamma < 1.0, "gamma must be in (0, 1)");
  require(c.samples >= 1, "samples must be >= 1");
  require(c.norm_samples >= 1, "norm_samples must be >= 1");
  require(c.T > 0.0 && std::isfinite(c.T), "T must be positive");
  require(c.p >= 0.0 && c.p < 2.0 * c.alpha + 1.0, "p must be in [0, 2 alpha + 1)");
  require(c.integrator == "magnus4" || c.integrator == "rk45",
          "integrator must be magnus4 or rk45");
  require(c.integrator_tol > 0.0, "integrator_tol must be positive");
  require(c.sample_dt > 0.0, "sample_dt must be positive");
  require(c.initial_modes >= 1 && c.initial_modes <= c.N, "initial_modes must be in 1..N");
  require(c.exclude_top >= 0 && c.exclude_top < c.N, "exclude_top must be in 0..N-1");
  require(!c.prefix.empty(), "prefix must not be empty");
  make_potential(c.potential, c.n, c.potential_sigma, c.mu);
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-periodic reducibility experiments for the perturbed harmonic oscillator",
               "kamqho"};
  app.require_subcommand(1, 1);
  ExperimentConfig cfg;
  std::string omega_text;
  std::string config_path;

  try {
    const std::string path = find_config_path(args);
    if (!path.empty()) cfg = load_config(path);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::vector<CLI::App*> subs;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " stage");
    bind_options(sub, cfg, omega_text, config_path);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::string command;
  for (CLI::App* s : subs) {
    if (s->parsed()) command = s->get_name();
  }

  try {
    if (!omega_text.empty()) cfg.omega = parse_omega(omega_text);
    validate(cfg);
    const Output o(cfg, command);
    json j;
    if (command == "assemble") {
      j = do_assemble(cfg, o);
    } else if (command == "reduce") {
      j = do_reduce(cfg, o, out).summary;
    } else if (command == "measure") {
      j = do_measure(cfg, o);
    } else if (command == "propagate") {
      j = do_propagate(cfg, o, out);
    } else if (command == "verify-norms") {
      j = do_verify_norms(cfg, o);
    } else {
      j = o.record();
      j["assemble"] = do_assemble(cfg, o);
      j["reduce"] = do_reduce(cfg, o, out).summary;
      j["measure"] = do_measure(cfg, o);
      j["propagate"] = do_propagate(cfg, o, out);
      j["verify_norms"] = do_verify_norms(cfg, o);
    }
    j["config"] = to_json(cfg);
    o.summary(j);
    out << j.dump(2) << '\n';
    if (command == "reduce" && j["status"] == to_string(RunStatus::Blowup)) return 4;
    if (command == "full" && j["reduce"]["status"] == to_string(RunStatus::Blowup)) return 4;
    return 0;
  } catch (const ResonantFrequency& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NormBlowup& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int a = 1; a < argc; ++a) args.emplace_back(argv[a]);
  return run_command(args, out, err);
}

}  // namespace kamqho
