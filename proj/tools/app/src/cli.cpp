#include "lipminor_app/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lipminor/brownian_oracle.hpp"
#include "lipminor/criteria.hpp"
#include "lipminor/error.hpp"
#include "lipminor/experiments.hpp"
#include "lipminor/minorant.hpp"
#include "lipminor/model_json.hpp"
#include "lipminor/path_csv.hpp"
#include "lipminor/report.hpp"
#include "lipminor/simulate.hpp"
#include "lipminor_app/acceptance.hpp"

namespace lipminor::app {
namespace {

using nlohmann::json;
namespace ex = lipminor::experiments;

enum class LogLevel { kQuiet, kInfo, kDebug };

struct Logger {
  std::ostream& err;
  LogLevel level = LogLevel::kInfo;

  void info(const std::string& msg) const {
    if (level >= LogLevel::kInfo) err << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level >= LogLevel::kDebug) err << "debug: " << msg << '\n';
  }
};

// Every option of the subcommand that was given, with its raw strings.
json run_config(const CLI::App& root, const CLI::App& sub) {
  json args = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& raw = opt->results();
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (raw.empty()) {
      args[key] = true;
    } else if (raw.size() == 1) {
      args[key] = raw.front();
    } else {
      args[key] = raw;
    }
  }
  const CLI::Option* level = root.get_option("--log-level");
  return {{"subcommand", sub.get_name()},
          {"args", args},
          {"log_level", level->count() ? level->results().front() : "info"}};
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw InputError("error while writing '" + file.string() + "'");
}

// Writes JSON to `out_path`, or to `out` when the path is empty.
void emit_json(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_text_file(out_path, j.dump(2) + "\n");
  }
}

json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json verdict_json(const IntegralVerdict& v) {
  return {{"verdict", to_string(v.verdict)},
          {"diverged", v.diverged},
          {"estimate", v.estimate},
          {"truncated_estimate", v.truncated_estimate},
          {"tail_estimate", v.tail_estimate},
          {"divergence_exponent", v.divergence_exponent},
          {"standard_error", v.standard_error},
          {"t_min", v.t_min},
          {"level_contributions", v.level_contributions},
          {"diagnostics", v.diagnostics}};
}

// ---- minorant ------------------------------------------------------------

struct MinorantArgs {
  std::string input;
  double alpha = 0.0;
  std::optional<double> guard;
  std::optional<double> tol;
  std::string out;
};

int cmd_minorant(const MinorantArgs& a, const json& config, const Logger& log) {
  const CadlagPath path = read_path_csv(std::filesystem::path(a.input));
  MinorantOptions options;
  options.guard = a.guard;
  options.tol = a.tol ? *a.tol : analytic_tolerance(path);
  const MinorantResult res = compute_minorant(path, a.alpha, options);
  const auto runs = extract_contact_set(res);

  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  {
    std::ofstream csv(dir / "minorant.csv", std::ios::binary);
    if (!csv) throw InputError("cannot write minorant.csv in '" + a.out + "'");
    write_minorant_csv(csv, path, res, report::provenance_comment(config));
  }

  json run_list = json::array();
  for (const auto& r : runs) run_list.push_back({path.time(r.first), path.time(r.last)});
  std::size_t contaminated = 0;
  for (auto c : res.contaminated) contaminated += c;
  json summary = {{"provenance", report::provenance(config)},
                  {"points", path.size()},
                  {"alpha", res.alpha},
                  {"guard", res.guard},
                  {"tol", res.tol},
                  {"contact_count", res.contact_count()},
                  {"contaminated_count", contaminated},
                  {"core_contact_runs", run_list},
                  {"sawtooth_pass", runs.size() < 2 || sawtooth_check(path, res).all_pass()}};
  if (path.origin_index()) {
    try {
      const auto s = straddle_interval(path, res);
      summary["straddle"] = {{"g", s.g}, {"d", s.d}, {"t", s.t}, {"k", s.k}, {"h", s.h},
                             {"s", s.s}, {"degenerate", s.degenerate}};
    } catch (const ContaminationError& e) {
      summary["straddle"] = {{"error", e.what()}};
    }
  }
  report::write_json_file(dir / "contacts.json", summary);
  log.info("minorant: " + std::to_string(res.contact_count()) + " contacts in " +
           std::to_string(path.size()) + " points");
  return kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  double window = 20.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const json& config, const Logger& log) {
  const LevyModel model = parse_model_spec(a.model);
  const CadlagPath path = simulate_path(model, {a.window, a.dt, a.seed, a.replicate});
  const std::filesystem::path file(a.out);
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream csv(file, std::ios::binary);
  if (!csv) throw InputError("cannot write '" + a.out + "'");
  write_path_csv(csv, path, report::provenance_comment(config));
  log.info("simulate: wrote " + std::to_string(path.size()) + " points to " + a.out);
  return kExitOk;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
  std::string function;
  double alpha = 1.0;
  double beta = 0.0;
  std::vector<double> x;
  double h = -1.0;
  std::string out;
};

const std::vector<std::string>& oracle_functions() {
  static const std::vector<std::string> names = {
      "k_laplace",     "lambda_ratio",   "k_density",      "k_cdf",         "lambda_density",
      "h_density",     "h_cdf",          "h_moments",      "t_laplace",     "p_t_positive",
      "s_laplace",     "ttilde_laplace", "neg_inf_rates",  "f_minus_laplace", "f_plus_laplace",
      "f_density"};
  return names;
}

int cmd_oracle(const OracleArgs& a, const json& config, std::ostream& out) {
  const oracle::BrownianParams p{a.alpha, a.beta};
  p.validate();
  const std::string& f = a.function;
  json values = json::array();
  auto each_x = [&](auto&& eval) {
    if (a.x.empty()) throw InputError("oracle: " + f + " needs --x");
    for (double x : a.x) values.push_back({{"x", x}, {"value", eval(x)}});
  };
  auto zero_drift = [&] {
    if (a.beta != 0.0) throw DomainError("oracle: " + f + " is defined for beta = 0 only");
  };
  if (f == "k_laplace") {
    each_x([&](double x) { return oracle::k_laplace(p, x); });
  } else if (f == "lambda_ratio") {
    each_x([&](double x) { return oracle::lambda_ratio(p, x); });
  } else if (f == "k_density") {
    zero_drift();
    each_x([&](double x) { return oracle::k_density_zero_drift(a.alpha, x); });
  } else if (f == "k_cdf") {
    zero_drift();
    each_x([&](double x) { return oracle::k_cdf_zero_drift(a.alpha, x); });
  } else if (f == "lambda_density") {
    zero_drift();
    each_x([&](double x) { return oracle::lambda_density_zero_drift(a.alpha, x); });
  } else if (f == "h_density") {
    each_x([&](double x) { return oracle::h_density(a.alpha, x); });
  } else if (f == "h_cdf") {
    each_x([&](double x) { return oracle::h_cdf(a.alpha, x); });
  } else if (f == "h_moments") {
    const auto [mean, var] = oracle::h_moments(a.alpha);
    values.push_back({{"mean", mean}, {"variance", var}});
  } else if (f == "t_laplace") {
    each_x([&](double x) { return oracle::t_laplace(p, x); });
  } else if (f == "p_t_positive") {
    values.push_back({{"value", oracle::p_t_positive(p)}});
  } else if (f == "s_laplace") {
    each_x([&](double x) { return oracle::s_laplace(p, x); });
  } else if (f == "ttilde_laplace") {
    each_x([&](double x) { return oracle::ttilde_laplace(p, x); });
  } else if (f == "neg_inf_rates") {
    const auto [minus, plus] = oracle::neg_inf_exp_rates(p);
    values.push_back({{"left", minus}, {"right", plus}});
  } else if (f == "f_minus_laplace") {
    each_x([&](double x) { return oracle::f_minus_laplace(p, x, a.h); });
  } else if (f == "f_plus_laplace") {
    each_x([&](double x) { return oracle::f_plus_laplace(p, x, a.h); });
  } else if (f == "f_density") {
    zero_drift();
    each_x([&](double x) { return oracle::f_density_zero_drift(x, a.h, a.alpha); });
  } else {
    throw InputError("oracle: unknown function '" + f + "'");
  }
  emit_json({{"provenance", report::provenance(config)},
             {"function", f},
             {"alpha", a.alpha},
             {"beta", a.beta},
             {"values", values}},
            a.out, out);
  return kExitOk;
}

// ---- criteria ------------------------------------------------------------

struct CriteriaArgs {
  std::string model;
  double alpha = 1.0;
  std::string test;
  double a = -1.0;
  double b = 1.0;
  double q = 1.0;
  double r_max = 32.0;
  int bisection = 12;
  std::string out;
};

int cmd_criteria(const CriteriaArgs& a, const json& config, std::ostream& out) {
  const LevyModel model = parse_model_spec(a.model);
  json result;
  int code = kExitOk;
  if (a.test == "finint") {
    const auto v = integral_test(model, a.a, a.b);
    result = verdict_json(v);
    result["a"] = a.a;
    result["b"] = a.b;
    if (v.verdict == Verdict::kIndeterminate) code = kExitNumerical;
  } else if (a.test == "regularity") {
    const auto r = regularity_test(model);
    result = verdict_json(r.verdict);
    result["regular"] = r.regular;
    if (r.verdict.verdict == Verdict::kIndeterminate) code = kExitNumerical;
  } else if (a.test == "rstar") {
    const auto r = estimate_r_star(model, 0.0, a.r_max, a.bisection);
    result = {{"r_star", finite_or_string(r.r_star)},
              {"bracket_lo", r.bracket_lo},
              {"bracket_hi", finite_or_string(r.bracket_hi)},
              {"all_converged", r.all_converged},
              {"all_diverged", r.all_diverged},
              {"indeterminate_count", r.indeterminate_count}};
  } else if (a.test == "vigon") {
    const auto v = vigon_identity(model, a.q, a.a, a.b);
    result = {{"lhs", v.lhs},       {"rhs", v.rhs},        {"abs_diff", v.abs_diff},
              {"lhs_error", v.lhs_error}, {"rhs_error", v.rhs_error}, {"converged", v.converged},
              {"q", a.q},           {"a", a.a},            {"b", a.b}};
    if (!v.converged) code = kExitNumerical;
  } else if (a.test == "pkzero") {
    const auto p = p_k_zero(model, a.alpha);
    result = {{"value", p.value},
              {"integral", finite_or_string(p.integral)},
              {"error", p.error},
              {"contact_class", to_string(p.contact_class)},
              {"note", p.note}};
  } else if (a.test == "classify") {
    const auto e = existence_check(model, a.alpha);
    const auto c = classify_contact_set(model, a.alpha);
    result = {{"exists", e.exists},
              {"degenerate", e.degenerate},
              {"existence_reason", e.reason},
              {"contact_class", to_string(c.contact_class)},
              {"reason", c.reason}};
  } else {
    throw InputError("criteria: unknown test '" + a.test + "'");
  }
  result["test"] = a.test;
  result["model"] = model_to_json(model);
  result["alpha"] = a.alpha;
  result["provenance"] = report::provenance(config);
  emit_json(result, a.out, out);
  return code;
}

// ---- experiment ----------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  double alpha = 1.0;
  double beta = 0.0;
  std::string model;
  std::size_t n = 1000;
  double dt = 1e-3;
  std::optional<double> window;
  std::uint64_t seed = 0;
  std::vector<double> theta_grid = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> alpha_list = {1.0, 2.0, 4.0, 8.0, 16.0};
  double check_alpha = 64.0;
  std::size_t check_stride = 10;
  bool no_ks_allowance = false;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& a, const json& config, const Logger& log,
                   std::ostream& out) {
  ex::ExperimentParams p;
  p.model = a.model.empty() ? LevyModel::brownian(a.beta) : parse_model_spec(a.model);
  p.alpha = a.name == "alpha_limit" ? a.alpha_list.front() : a.alpha;
  p.dt = a.dt;
  p.n = a.n;
  p.seed = a.seed;
  p.ks_allowance = !a.no_ks_allowance;
  p.window = a.window ? *a.window : std::max(20.0, std::ceil(ex::minimum_window(p.model, p.alpha)));
  ex::ExtraOptions extra;
  extra.theta_grid = a.theta_grid;
  extra.alpha_limit.alpha_list = a.alpha_list;
  extra.alpha_limit.check_alpha = a.check_alpha;
  extra.alpha_limit.check_stride = a.check_stride;

  log.debug("experiment " + a.name + " with " + std::to_string(ex::worker_count()) + " workers");
  const auto report = ex::run_by_name(a.name, p, extra);
  const auto files = report::write_experiment(a.out, report, config);
  for (const auto& c : report.checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.statistic
        << (c.pass ? " <= " : " > ") << c.threshold << '\n';
  }
  log.info("experiment " + a.name + ": " + std::to_string(report.accepted) + " accepted of " +
           std::to_string(report.attempted) + ", wrote " + std::to_string(files.size()) +
           " files to " + a.out);
  return report.passed() ? kExitOk : kExitAcceptanceFailure;
}

// ---- verify-all ----------------------------------------------------------

struct VerifyArgs {
  std::string profile = "quick";
  std::vector<int> only;
  std::uint64_t seed = SuiteOptions{}.seed;
  bool tamper = false;
  std::string out;
};

int cmd_verify_all(const VerifyArgs& a, const json& config, std::ostream& out) {
  SuiteOptions opt;
  opt.profile = parse_profile(a.profile);
  opt.only = a.only;
  opt.seed = a.seed;
  opt.tamper = a.tamper;
  opt.on_result = [&](const CriterionResult& r) { out << format_result_line(r) << std::endl; };
  const auto results = run_acceptance(opt);
  json summary = suite_summary(opt, results);
  summary["provenance"] = report::provenance(config);
  if (!a.out.empty()) write_text_file(a.out, summary.dump(2) + "\n");
  const bool pass = summary["pass"].get<bool>();
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  out << (pass ? "ALL PASS" : "FAILED") << " (" << results.size() - failed << "/"
      << results.size() << " criteria passed, profile " << a.profile << ")" << std::endl;
  return pass ? kExitOk : kExitAcceptanceFailure;
}

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::kNumerical ? kExitNumerical : kExitInputError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lipschitz minorants of sampled paths and Lévy process experiments", "lipminor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LIPMINOR_VERSION));
  std::string level_name = "info";
  app.add_option("--log-level", level_name, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  MinorantArgs ma;
  auto* minorant = app.add_subcommand("minorant", "alpha-Lipschitz minorant of a path CSV");
  minorant->add_option("--input", ma.input, "path CSV (t,value,left_value)")->required();
  minorant->add_option("--alpha", ma.alpha, "slope bound")->required();
  minorant->add_option("--guard", ma.guard, "contamination guard band width");
  minorant->add_option("--tol", ma.tol, "contact tolerance (default 1e-9 * value scale)");
  minorant->add_option("--out", ma.out, "output directory")->required();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate a two-sided Lévy path");
  simulate->add_option("--model", sa.model, "model JSON text or file")->required();
  simulate->add_option("--window", sa.window, "half width W of [-W, W]");
  simulate->add_option("--dt", sa.dt, "grid step");
  simulate->add_option("--seed", sa.seed, "RNG seed")->required();
  simulate->add_option("--replicate", sa.replicate, "replicate id");
  simulate->add_option("--out", sa.out, "output path CSV")->required();

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brownian closed forms as JSON");
  oracle_cmd->add_option("--function", oa.function, "evaluator name")
      ->required()
      ->check(CLI::IsMember(oracle_functions()));
  oracle_cmd->add_option("--alpha", oa.alpha, "slope bound");
  oracle_cmd->add_option("--beta", oa.beta, "drift");
  oracle_cmd->add_option("--x", oa.x, "arguments, comma separated")->delimiter(',');
  oracle_cmd->add_option("--level", oa.h, "level h <= 0 for the f evaluators");
  oracle_cmd->add_option("--out", oa.out, "output file (default stdout)");

  CriteriaArgs ca;
  auto* criteria = app.add_subcommand("criteria", "integral criteria and contact-set class");
  criteria->add_option("--model", ca.model, "model JSON text or file")->required();
  criteria->add_option("--alpha", ca.alpha, "slope bound");
  criteria->add_option("--test", ca.test, "which test")
      ->required()
      ->check(CLI::IsMember({"finint", "regularity", "rstar", "vigon", "pkzero", "classify"}));
  criteria->add_option("--a", ca.a, "lower slope of the interval");
  criteria->add_option("--b", ca.b, "upper slope of the interval");
  criteria->add_option("--q", ca.q, "killing rate for the identity check");
  criteria->add_option("--r-max", ca.r_max, "upper end of the r* search");
  criteria->add_option("--bisection", ca.bisection, "bisection steps for r*");
  criteria->add_option("--out", ca.out, "output file (default stdout)");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiment");
  experiment->add_option("name", ea.name, "experiment name")
      ->required()
      ->check(CLI::IsMember(ex::experiment_names()));
  experiment->add_option("--alpha", ea.alpha, "slope bound");
  experiment->add_option("--beta", ea.beta, "Brownian drift (ignored with --model)");
  experiment->add_option("--model", ea.model, "model JSON text or file");
  experiment->add_option("--n", ea.n, "replicates");
  experiment->add_option("--dt", ea.dt, "grid step");
  experiment->add_option("--window", ea.window, "half width W (default max(20, 20/(alpha-|mean|)))");
  experiment->add_option("--seed", ea.seed, "RNG seed")->required();
  experiment->add_option("--theta-grid", ea.theta_grid, "k_laplace thetas")->delimiter(',');
  experiment->add_option("--alpha-list", ea.alpha_list, "alpha_limit slopes")->delimiter(',');
  experiment->add_option("--check-alpha", ea.check_alpha, "alpha_limit inclusion slope");
  experiment->add_option("--check-stride", ea.check_stride, "alpha_limit subsampling stride");
  experiment->add_flag("--no-ks-allowance", ea.no_ks_allowance, "drop the c sqrt(dt) KS term");
  experiment->add_option("--out", ea.out, "output directory")->required();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_option("--profile", va.profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--only", va.only, "criterion ids, comma separated")->delimiter(',');
  verify->add_option("--seed", va.seed, "suite seed");
  verify->add_option("--out", va.out, "summary JSON file");
  verify->add_flag("--tamper", va.tamper)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  Logger log{err, level_name == "quiet" ? LogLevel::kQuiet
                  : level_name == "debug" ? LogLevel::kDebug
                                          : LogLevel::kInfo};
  try {
    if (minorant->parsed()) return cmd_minorant(ma, run_config(app, *minorant), log);
    if (simulate->parsed()) return cmd_simulate(sa, run_config(app, *simulate), log);
    if (oracle_cmd->parsed()) return cmd_oracle(oa, run_config(app, *oracle_cmd), out);
    if (criteria->parsed()) return cmd_criteria(ca, run_config(app, *criteria), out);
    if (experiment->parsed()) return cmd_experiment(ea, run_config(app, *experiment), log, out);
    if (verify->parsed()) return cmd_verify_all(va, run_config(app, *verify), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace lipminor::app
