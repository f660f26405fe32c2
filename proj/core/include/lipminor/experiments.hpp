#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipminor/levy_model.hpp"

namespace lipminor::experiments {

// Columnar numeric table, written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Estimate {
  std::string name;
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::optional<double> oracle;
};

// A pass/fail decision: pass iff `statistic <= threshold`.
struct Check {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json params;
  std::size_t attempted = 0;
  std::size_t accepted = 0;
  std::vector<Estimate> estimates;
  std::vector<Check> checks;
  nlohmann::json extra = nlohmann::json::object();
  Table raw;
  std::vector<std::pair<std::string, Table>> series;
  // Kept out of to_json so the summary is reproducible byte for byte.
  double runtime_seconds = 0.0;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const Check* find_check(const std::string& name) const;
  [[nodiscard]] const Estimate* find_estimate(const std::string& name) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct ExperimentParams {
  LevyModel model = LevyModel::brownian(0.0);
  double alpha = 1.0;
  double window = 20.0;
  double dt = 1e-3;
  std::size_t n = 1000;  // accepted replicates (paths for the structural experiments)
  std::uint64_t seed = 0;
  // Adds c sqrt(dt) to KS thresholds; see kKsAllowance*.
  bool ks_allowance = true;
  // Worker threads; 0 means worker_count().
  unsigned threads = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

// Discretisation allowances c in the KS threshold base + c sqrt(dt).
// H: slope of the KS distance in sqrt(dt) between dt = 1e-3 (0.0410) and
// dt = 2.5e-4 (0.0248) at alpha = 1.5, beta = 0.5, N = 2e4.
// Infimum: a grid maximum of Brownian motion undershoots by about
// 0.5826 sqrt(dt), which moves an Exp(2) CDF by at most 1.17 sqrt(dt).
inline constexpr double kKsAllowanceH = 1.0;
inline constexpr double kKsAllowanceInfimum = 1.2;

// Smallest window keeping the straddling interval inside with high
// probability: 20 / (alpha - |E X_1|).
[[nodiscard]] double minimum_window(const LevyModel& model, double alpha);

// min(hardware threads, LIPMINOR_THREADS) and at least 1.
[[nodiscard]] unsigned worker_count();

// H against Gamma(2, 4 alpha): mean within 3 SE + 0.01 and the KS distance.
// Brownian models only; heights are compared in unit-variance scale.
[[nodiscard]] ExperimentReport run_h_experiment(const ExperimentParams& params);

// Fraction of T > 0 against (1 + beta / alpha) / 2.
[[nodiscard]] ExperimentReport run_t_sign(const ExperimentParams& params);

// E[exp(-theta K)] on theta_grid; with zero drift also K in 20 bins that are
// equiprobable under the zero-drift density.
[[nodiscard]] ExperimentReport run_k_laplace(const ExperimentParams& params,
                                             const std::vector<double>& theta_grid);

// Agreement of the recipe end point with D and the ordering G <= T <= S <= D,
// both with one grid step of slack.
[[nodiscard]] ExperimentReport run_recipe_check(const ExperimentParams& params);

struct AlphaLimitOptions {
  std::vector<double> alpha_list = {1.0, 2.0, 4.0, 8.0, 16.0};
  // Every strict local minimum must be a contact at this slope on the path
  // subsampled with `check_stride`.
  double check_alpha = 64.0;
  std::size_t check_stride = 10;
};

// Nesting of contact masks across alpha_list (exact), the median distance from
// strict local minima to the nearest contact per alpha, and the inclusion of
// all local minima at check_alpha.
[[nodiscard]] ExperimentReport run_alpha_limit(const ExperimentParams& params,
                                               const AlphaLimitOptions& options = {});

// Fraction of grid time in the contact set against p_k_zero. Requires the
// positive-Lebesgue class.
[[nodiscard]] ExperimentReport run_stationarity_cover(const ExperimentParams& params);

// -inf_{t <= 0} (X_t - alpha t) against Exp(2 (alpha - beta)) for Brownian
// models; checks the simulation and windowing end to end.
[[nodiscard]] ExperimentReport run_infimum_law(const ExperimentParams& params);

// Names accepted by run_by_name.
[[nodiscard]] const std::vector<std::string>& experiment_names();

struct ExtraOptions {
  std::vector<double> theta_grid = {0.5, 1.0, 2.0, 4.0};
  AlphaLimitOptions alpha_limit;
};
[[nodiscard]] ExperimentReport run_by_name(const std::string& name, const ExperimentParams& params,
                                           const ExtraOptions& extra = {});

}  // namespace lipminor::experiments
