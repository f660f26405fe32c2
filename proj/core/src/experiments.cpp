#include "lipminor/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "lipminor/brownian_oracle.hpp"
#include "lipminor/criteria.hpp"
#include "lipminor/error.hpp"
#include "lipminor/minorant.hpp"
#include "lipminor/model_json.hpp"
#include "lipminor/path_csv.hpp"
#include "lipminor/simulate.hpp"
#include "lipminor/stats.hpp"

namespace lipminor::experiments {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_common(const ExperimentParams& p, const std::string& who) {
  p.model.validate();
  if (!std::isfinite(p.alpha) || !(p.alpha > 0.0)) throw ParameterError(who + ": alpha must be > 0");
  if (p.n == 0) throw ParameterError(who + ": n must be positive");
  const auto ex = existence_check(p.model, p.alpha);
  if (!ex.exists || ex.degenerate) {
    throw ParameterError(who + ": no straddling interval for this model: " + ex.reason);
  }
  const double w_min = minimum_window(p.model, p.alpha);
  if (p.window < w_min * (1.0 - 1e-12)) {
    throw ParameterError(who + ": window " + format_double(p.window) +
                         " is below the minimum " + format_double(w_min) +
                         " = 20 / (alpha - |E X_1|)");
  }
  (void)steps_per_side(p.window, p.dt);
}

void require_brownian(const ExperimentParams& p, const std::string& who) {
  if (p.model.has_jumps() || !(p.model.sigma2 > 0.0)) {
    throw ParameterError(who + ": needs a Brownian model (sigma2 > 0, no jumps)");
  }
}

oracle::UnitVarianceScaling unit_scaling(const ExperimentParams& p) {
  return oracle::to_unit_variance(p.alpha, p.model.drift, std::sqrt(p.model.sigma2));
}

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

unsigned threads_for(const ExperimentParams& p) {
  return p.threads > 0 ? p.threads : worker_count();
}

// Draws replicates 0, 1, 2, ... and keeps the first `target` accepted ones
// in replicate order, so the accepted set does not depend on scheduling.
// sample(id) returns nullopt for a contaminated replicate.
template <class R, class F>
std::vector<R> collect_accepted(const ExperimentParams& p, std::size_t target,
                                const std::string& who, std::size_t& attempted, F&& sample) {
  std::vector<R> out;
  out.reserve(target);
  attempted = 0;
  std::uint64_t next_id = 0;
  while (out.size() < target) {
    const std::size_t need = target - out.size();
    const double rate =
        attempted == 0 ? 1.0 : std::max(0.5, static_cast<double>(out.size()) / attempted);
    const auto batch = static_cast<std::size_t>(std::ceil(need / rate * 1.02)) + 8;
    std::vector<std::optional<R>> slots(batch);
    parallel_for(batch, threads_for(p),
                 [&](std::size_t i) { slots[i] = sample(next_id + i); });
    for (std::size_t i = 0; i < batch && out.size() < target; ++i) {
      ++attempted;
      if (slots[i]) out.push_back(std::move(*slots[i]));
    }
    next_id += batch;
    if (attempted >= 20 && 2 * out.size() < attempted) {
      throw ContaminationError(
          who + ": acceptance rate " + format_double(static_cast<double>(out.size()) / attempted) +
          " is below 50%; the window is too small for this model, increase --window");
    }
  }
  return out;
}

SimConfig sim_config(const ExperimentParams& p, std::uint64_t id) {
  return SimConfig{p.window, p.dt, p.seed, id};
}

struct StraddleRecord {
  std::uint64_t id = 0;
  StraddleInterval s;
};

std::optional<StraddleRecord> sample_straddle(const ExperimentParams& p, std::uint64_t id) {
  thread_local MinorantResult res;
  const CadlagPath path = simulate_path(p.model, sim_config(p, id));
  compute_minorant(path, p.alpha, {}, res);
  try {
    return StraddleRecord{id, straddle_interval(path, res)};
  } catch (const ContaminationError&) {
    return std::nullopt;
  }
}

std::vector<StraddleRecord> straddle_sample(const ExperimentParams& p, const std::string& who,
                                            std::size_t& attempted) {
  return collect_accepted<StraddleRecord>(
      p, p.n, who, attempted, [&](std::uint64_t id) { return sample_straddle(p, id); });
}

Table straddle_table(const std::vector<StraddleRecord>& records) {
  Table t;
  t.columns = {"replicate", "g", "d", "t", "k", "h", "l", "r", "s", "degenerate"};
  t.rows.reserve(records.size());
  for (const auto& r : records) {
    const auto& s = r.s;
    t.rows.push_back({static_cast<double>(r.id), s.g, s.d, s.t, s.k, s.h, s.l, s.r, s.s,
                      s.degenerate ? 1.0 : 0.0});
  }
  return t;
}

std::size_t degenerate_count(const std::vector<StraddleRecord>& records) {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const StraddleRecord& r) { return r.s.degenerate; }));
}

ExperimentReport start_report(const std::string& name, const ExperimentParams& p) {
  ExperimentReport r;
  r.name = name;
  r.params = p.to_json();
  return r;
}

void finish_sampling(ExperimentReport& r, std::size_t attempted, std::size_t accepted) {
  r.attempted = attempted;
  r.accepted = accepted;
  r.extra["acceptance_rate"] =
      attempted == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempted);
}

Check make_check(std::string name, double statistic, double threshold, std::string detail = {}) {
  return Check{std::move(name), statistic, threshold, statistic <= threshold, std::move(detail)};
}

// Standard error of the sample variance from the fourth central moment.
double variance_se(const std::vector<double>& xs, double mean, double var) {
  double m4 = 0.0;
  for (double x : xs) m4 += std::pow(x - mean, 4);
  m4 /= static_cast<double>(xs.size());
  return std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(xs.size()));
}

Table cdf_series(std::vector<double> xs, double upper,
                 const std::function<double(double)>& oracle_cdf) {
  std::sort(xs.begin(), xs.end());
  Table t;
  t.columns = {"x", "empirical_cdf", "oracle_cdf"};
  constexpr int kPoints = 101;
  for (int j = 0; j < kPoints; ++j) {
    const double x = upper * j / (kPoints - 1);
    const auto below = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    t.rows.push_back({x, static_cast<double>(below) / static_cast<double>(xs.size()), oracle_cdf(x)});
  }
  return t;
}

std::string theta_label(double theta) { return "theta=" + format_double(theta); }

}  // namespace

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ExperimentReport::find_check(const std::string& check_name) const {
  for (const auto& c : checks) {
    if (c.name == check_name) return &c;
  }
  return nullptr;
}

const Estimate* ExperimentReport::find_estimate(const std::string& estimate_name) const {
  for (const auto& e : estimates) {
    if (e.name == estimate_name) return &e;
  }
  return nullptr;
}

json ExperimentReport::to_json() const {
  json j;
  j["name"] = name;
  j["params"] = params;
  j["attempted"] = attempted;
  j["accepted"] = accepted;
  json est = json::array();
  for (const auto& e : estimates) {
    json item = {{"name", e.name}, {"value", e.value}, {"se", e.se}, {"n", e.n}};
    if (e.oracle) {
      item["oracle"] = *e.oracle;
      if (e.se > 0.0) item["z"] = (e.value - *e.oracle) / e.se;
    }
    est.push_back(item);
  }
  j["estimates"] = est;
  json chk = json::array();
  for (const auto& c : checks) {
    chk.push_back({{"name", c.name},
                   {"statistic", c.statistic},
                   {"threshold", c.threshold},
                   {"pass", c.pass},
                   {"detail", c.detail}});
  }
  j["checks"] = chk;
  j["pass"] = passed();
  j["extra"] = extra;
  return j;
}

json ExperimentParams::to_json() const {
  return {{"model", model_to_json(model)}, {"alpha", alpha},   {"window", window},
          {"dt", dt},                      {"n", n},           {"seed", seed},
          {"ks_allowance", ks_allowance}};
}

double minimum_window(const LevyModel& model, double alpha) {
  const double gap = alpha - std::abs(eval_mean(model));
  if (!(gap > 0.0)) throw ParameterError("minimum_window: requires |E X_1| < alpha");
  return 20.0 / gap;
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIPMINOR_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

ExperimentReport run_h_experiment(const ExperimentParams& params) {
  const std::string who = "h";
  check_common(params, who);
  require_brownian(params, who);
  if (params.n < 1000) throw ParameterError("h: needs n >= 1000");
  const auto start = Clock::now();
  const auto scaling = unit_scaling(params);
  const double a = scaling.params.alpha;

  std::size_t attempted = 0;
  const auto records = straddle_sample(params, who, attempted);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());

  std::vector<double> hs;
  hs.reserve(records.size());
  for (const auto& rec : records) hs.push_back(rec.s.h / scaling.value_scale);
  const auto sum = stats::summarize(hs);
  const auto [mean_o, var_o] = oracle::h_moments(a);
  r.estimates.push_back({"mean_h", sum.mean, sum.se, sum.n, mean_o});
  r.estimates.push_back(
      {"var_h", sum.variance, variance_se(hs, sum.mean, sum.variance), sum.n, var_o});

  const auto cdf = [a](double h) { return oracle::h_cdf(a, h); };
  const double ks = stats::ks_distance(hs, cdf);
  const double ks_threshold = 0.03 + (params.ks_allowance ? kKsAllowanceH * std::sqrt(params.dt) : 0.0);
  r.checks.push_back(make_check("mean_h", std::abs(sum.mean - mean_o), 3.0 * sum.se + 0.01,
                                "|mean(H) - 1/(2 alpha)| <= 3 SE + 0.01"));
  r.checks.push_back(make_check("ks_h", ks, ks_threshold, "KS(H, Gamma(2, 4 alpha))"));
  r.extra["ks_pvalue"] = stats::ks_pvalue(ks, hs.size());
  r.extra["degenerate"] = degenerate_count(records);
  r.extra["unit_alpha"] = a;
  r.raw = straddle_table(records);
  r.series.emplace_back("h_cdf", cdf_series(hs, 8.0 * mean_o, cdf));
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_t_sign(const ExperimentParams& params) {
  const std::string who = "t_sign";
  check_common(params, who);
  require_brownian(params, who);
  const auto start = Clock::now();
  const auto scaling = unit_scaling(params);

  std::size_t attempted = 0;
  const auto records = straddle_sample(params, who, attempted);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());

  // T = 0 happens only on the grid (origin is a contact); such ties count
  // one half.
  double positive = 0.0;
  for (const auto& rec : records) positive += rec.s.t > 0.0 ? 1.0 : (rec.s.t == 0.0 ? 0.5 : 0.0);
  const double n = static_cast<double>(records.size());
  const double frac = positive / n;
  const double target = oracle::p_t_positive(scaling.params);
  const double se = stats::binomial_se(target, records.size());
  r.estimates.push_back({"p_t_positive", frac, se, records.size(), target});
  r.checks.push_back(make_check("p_t_positive", std::abs(frac - target), 3.0 * se,
                                "|P(T > 0) - (1 + beta/alpha)/2| <= 3 binomial SE"));
  r.extra["degenerate"] = degenerate_count(records);
  r.raw = straddle_table(records);
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_k_laplace(const ExperimentParams& params,
                               const std::vector<double>& theta_grid) {
  const std::string who = "k_laplace";
  check_common(params, who);
  require_brownian(params, who);
  if (theta_grid.empty()) throw ParameterError("k_laplace: theta grid is empty");
  for (double th : theta_grid) {
    if (!std::isfinite(th) || th < 0.0) throw ParameterError("k_laplace: theta must be >= 0");
  }
  const auto start = Clock::now();
  const auto scaling = unit_scaling(params);

  std::size_t attempted = 0;
  const auto records = straddle_sample(params, who, attempted);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());
  r.params["theta_grid"] = theta_grid;

  std::vector<double> ks;
  ks.reserve(records.size());
  double min_k = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    ks.push_back(rec.s.k);
    if (!rec.s.degenerate) min_k = std::min(min_k, rec.s.k);
  }

  Table laplace;
  laplace.columns = {"theta", "empirical", "se", "oracle"};
  std::vector<double> e(ks.size());
  for (double th : theta_grid) {
    for (std::size_t i = 0; i < ks.size(); ++i) e[i] = std::exp(-th * ks[i]);
    const auto sum = stats::summarize(e);
    const double o = oracle::k_laplace(scaling.params, th);
    r.estimates.push_back({"laplace_" + theta_label(th), sum.mean, sum.se, sum.n, o});
    r.checks.push_back(make_check("laplace_" + theta_label(th), std::abs(sum.mean - o),
                                  std::max(3.0 * sum.se, 0.02 * o),
                                  "|E exp(-theta K) - oracle| <= max(3 SE, 2% of oracle)"));
    laplace.rows.push_back({th, sum.mean, sum.se, o});
  }
  r.series.emplace_back("k_laplace", std::move(laplace));
  r.checks.push_back(make_check("k_at_least_grid_step", params.dt - min_k, 1e-9 * params.dt,
                                "min K over non-degenerate replicates >= dt"));

  const auto kmean = stats::summarize(ks);
  r.estimates.push_back({"mean_k", kmean.mean, kmean.se, kmean.n, std::nullopt});

  if (scaling.params.beta == 0.0) {
    const double a = scaling.params.alpha;
    constexpr int kBins = 20;
    std::vector<double> edges = {0.0};
    for (int j = 1; j < kBins; ++j) {
      const double target = static_cast<double>(j) / kBins;
      double lo = 0.0;
      double hi = 1.0;
      while (oracle::k_cdf_zero_drift(a, hi) < target) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (oracle::k_cdf_zero_drift(a, mid) < target ? lo : hi) = mid;
      }
      edges.push_back(0.5 * (lo + hi));
    }
    edges.push_back(std::numeric_limits<double>::infinity());
    const auto frac = stats::bin_fractions(ks, edges);
    Table bins;
    bins.columns = {"lo", "hi", "empirical", "oracle"};
    double sup = 0.0;
    for (int j = 0; j < kBins; ++j) {
      sup = std::max(sup, std::abs(frac[j] - 1.0 / kBins));
      const double hi = j + 1 < kBins ? edges[j + 1] : -1.0;  // -1 marks the open last bin
      bins.rows.push_back({edges[j], hi, frac[j], 1.0 / kBins});
    }
    r.checks.push_back(make_check("k_density_bins", sup, 0.02,
                                  "sup over 20 equiprobable bins |empirical - 0.05|"));
    r.extra["k_ks"] = stats::ks_distance(ks, [a](double k) { return oracle::k_cdf_zero_drift(a, k); });
    r.series.emplace_back("k_bins", std::move(bins));
  }
  r.extra["degenerate"] = degenerate_count(records);
  r.raw = straddle_table(records);
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_recipe_check(const ExperimentParams& params) {
  const std::string who = "recipe";
  check_common(params, who);
  const auto start = Clock::now();

  struct Record {
    std::uint64_t id = 0;
    StraddleInterval s;
    double e = 0.0;
    bool precondition_failed = false;
  };
  auto sample = [&](std::uint64_t id) -> std::optional<Record> {
    thread_local MinorantResult res;
    const CadlagPath path = simulate_path(params.model, sim_config(params, id));
    compute_minorant(path, params.alpha, {}, res);
    Record rec{id, {}, 0.0, false};
    try {
      rec.s = straddle_interval(path, res);
      if (rec.s.degenerate) return rec;
      rec.e = recipe_d(path, params.alpha).e;
    } catch (const ContaminationError&) {
      return std::nullopt;
    } catch (const PreconditionError&) {
      rec.precondition_failed = true;
    }
    return rec;
  };
  std::size_t attempted = 0;
  const auto records = collect_accepted<Record>(params, params.n, who, attempted, sample);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());

  const double slack = params.dt * (1.0 + 1e-9);
  std::size_t used = 0;
  std::size_t e_ok = 0;
  std::size_t order_ok = 0;
  std::size_t degenerate = 0;
  std::size_t precondition = 0;
  r.raw.columns = {"replicate", "g", "t", "s", "d", "e", "e_matches_d", "ordered", "status"};
  for (const auto& rec : records) {
    const auto& s = rec.s;
    double status = 0.0;
    bool em = false;
    bool ord = false;
    if (s.degenerate) {
      ++degenerate;
      status = 1.0;
    } else if (rec.precondition_failed) {
      ++precondition;
      status = 2.0;
    } else {
      ++used;
      em = std::abs(rec.e - s.d) <= slack;
      ord = s.g <= s.t + slack && s.t <= s.s + slack && s.s <= s.d + slack;
      e_ok += em ? 1 : 0;
      order_ok += ord ? 1 : 0;
    }
    r.raw.rows.push_back({static_cast<double>(rec.id), s.g, s.t, s.s, s.d, rec.e, em ? 1.0 : 0.0,
                          ord ? 1.0 : 0.0, status});
  }
  const double denom = std::max<std::size_t>(used, 1);
  const double fe = e_ok / denom;
  const double fo = order_ok / denom;
  r.estimates.push_back({"e_matches_d", fe, stats::binomial_se(fe, used), used, std::nullopt});
  r.estimates.push_back({"ordered", fo, stats::binomial_se(fo, used), used, std::nullopt});
  r.checks.push_back(make_check("e_matches_d", 0.999 - fe, 0.0, "fraction |e - D| <= dt is >= 0.999"));
  r.checks.push_back(
      make_check("ordered", 0.999 - fo, 0.0, "fraction G <= T <= S <= D (dt slack) is >= 0.999"));
  r.extra["degenerate"] = degenerate;
  r.extra["precondition_failures"] = precondition;
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_alpha_limit(const ExperimentParams& params, const AlphaLimitOptions& options) {
  const std::string who = "alpha_limit";
  const auto& alphas = options.alpha_list;
  if (alphas.size() < 2) throw ParameterError("alpha_limit: needs at least two slopes");
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1])) throw ParameterError("alpha_limit: slopes must increase");
  }
  if (params.model.is_compound_poisson()) {
    throw ParameterError("alpha_limit: compound Poisson paths are not abrupt");
  }
  ExperimentParams first = params;
  first.alpha = alphas.front();
  check_common(first, who);
  if (!(options.check_alpha > 0.0) || options.check_stride == 0) {
    throw ParameterError("alpha_limit: invalid inclusion check settings");
  }
  const std::size_t steps = steps_per_side(params.window, params.dt);
  if (steps % options.check_stride != 0) {
    throw ParameterError("alpha_limit: check stride must divide the steps per side");
  }
  const auto start = Clock::now();
  const std::size_t na = alphas.size();

  struct PathRecord {
    std::vector<std::size_t> contacts;
    std::vector<std::size_t> nesting_violations;  // between alphas[j] and alphas[j + 1]
    // Local-minimum to nearest-contact distances, in grid steps, as counts.
    std::vector<std::map<std::size_t, std::size_t>> min_to_contact;
    std::vector<double> contact_to_min_sum;
    std::size_t minima_checked = 0;
    std::size_t minima_missed = 0;
  };

  auto strict_minima = [](const std::vector<double>& w) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
      if (w[i] < w[i - 1] && w[i] < w[i + 1]) out.push_back(i);
    }
    return out;
  };
  auto nearest = [](const std::vector<std::size_t>& sorted, std::size_t i) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), i);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    if (it != sorted.end()) best = *it - i;
    if (it != sorted.begin()) best = std::min(best, i - *(it - 1));
    return best;
  };

  std::vector<PathRecord> records(params.n);
  parallel_for(params.n, threads_for(params), [&](std::size_t id) {
    thread_local MinorantResult res;
    const CadlagPath path = simulate_path(params.model, sim_config(params, id));
    const std::vector<double> w = path.lower_values();
    const auto minima = strict_minima(w);
    PathRecord rec;
    rec.contacts.resize(na);
    rec.nesting_violations.resize(na - 1);
    rec.min_to_contact.resize(na);
    rec.contact_to_min_sum.resize(na);
    std::vector<std::uint8_t> previous;
    for (std::size_t a = 0; a < na; ++a) {
      compute_minorant(path, alphas[a], {}, res);
      if (a > 0) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          rec.nesting_violations[a - 1] += (previous[i] && !res.contact_mask[i]) ? 1 : 0;
        }
      }
      previous = res.contact_mask;
      std::vector<std::size_t> core_contacts;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (res.contact_mask[i] && !res.contaminated[i]) core_contacts.push_back(i);
      }
      rec.contacts[a] = core_contacts.size();
      if (core_contacts.empty()) continue;
      for (std::size_t i : minima) {
        if (!res.contaminated[i]) ++rec.min_to_contact[a][nearest(core_contacts, i)];
      }
      if (!minima.empty()) {
        for (std::size_t i : core_contacts) {
          rec.contact_to_min_sum[a] += static_cast<double>(nearest(minima, i)) * params.dt;
        }
      }
    }

    // Same path observed every check_stride steps.
    std::vector<double> ct;
    std::vector<double> cv;
    for (std::size_t i = 0; i < path.size(); i += options.check_stride) {
      ct.push_back(path.time(i));
      cv.push_back(path.lower_value(i));
    }
    const CadlagPath coarse(std::move(ct), std::move(cv));
    compute_minorant(coarse, options.check_alpha, {}, res);
    for (std::size_t i : strict_minima(coarse.lower_values())) {
      if (res.contaminated[i]) continue;
      ++rec.minima_checked;
      rec.minima_missed += res.contact_mask[i] ? 0 : 1;
    }
    records[id] = std::move(rec);
  });

  ExperimentReport r = start_report(who, params);
  r.params.erase("alpha");
  r.params["alpha_list"] = alphas;
  r.params["check_alpha"] = options.check_alpha;
  r.params["check_stride"] = options.check_stride;
  finish_sampling(r, params.n, params.n);

  std::size_t violations = 0;
  std::size_t checked = 0;
  std::size_t missed = 0;
  std::vector<std::map<std::size_t, std::size_t>> hist(na);
  std::vector<double> c2m_sum(na, 0.0);
  std::vector<double> contacts(na, 0.0);
  r.raw.columns = {"replicate"};
  for (double a : alphas) r.raw.columns.push_back("contacts_alpha_" + format_double(a));
  r.raw.columns.push_back("nesting_violations");
  r.raw.columns.push_back("minima_checked");
  r.raw.columns.push_back("minima_missed");
  for (std::size_t id = 0; id < records.size(); ++id) {
    const auto& rec = records[id];
    std::vector<double> row = {static_cast<double>(id)};
    std::size_t path_violations = 0;
    for (std::size_t v : rec.nesting_violations) path_violations += v;
    for (std::size_t a = 0; a < na; ++a) {
      row.push_back(static_cast<double>(rec.contacts[a]));
      contacts[a] += static_cast<double>(rec.contacts[a]);
      c2m_sum[a] += rec.contact_to_min_sum[a];
      for (const auto& [d, c] : rec.min_to_contact[a]) hist[a][d] += c;
    }
    violations += path_violations;
    checked += rec.minima_checked;
    missed += rec.minima_missed;
    row.push_back(static_cast<double>(path_violations));
    row.push_back(static_cast<double>(rec.minima_checked));
    row.push_back(static_cast<double>(rec.minima_missed));
    r.raw.rows.push_back(std::move(row));
  }

  Table series;
  series.columns = {"alpha", "median_min_to_contact", "mean_contact_to_min", "contacts_per_path"};
  std::vector<double> medians(na, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    std::size_t total = 0;
    for (const auto& [d, c] : hist[a]) total += c;
    std::size_t seen = 0;
    for (const auto& [d, c] : hist[a]) {
      seen += c;
      if (2 * seen > total) {
        medians[a] = static_cast<double>(d) * params.dt;
        break;
      }
    }
    const double mean_c2m = contacts[a] > 0.0 ? c2m_sum[a] / contacts[a] : 0.0;
    series.rows.push_back({alphas[a], medians[a], mean_c2m, contacts[a] / params.n});
    r.estimates.push_back({"median_min_to_contact_alpha=" + format_double(alphas[a]), medians[a],
                           0.0, total, std::nullopt});
  }
  std::size_t not_decreasing = 0;
  for (std::size_t a = 1; a < na; ++a) not_decreasing += medians[a] < medians[a - 1] ? 0 : 1;

  r.checks.push_back(make_check("nesting_violations", static_cast<double>(violations), 0.0,
                                "contact(alpha_j) subset of contact(alpha_j+1) at every index"));
  r.checks.push_back(make_check("median_decreasing", static_cast<double>(not_decreasing), 0.0,
                                "median local-minimum to contact distance strictly decreasing"));
  r.checks.push_back(make_check("minima_are_contacts", static_cast<double>(missed), 0.0,
                                "strict local minima in the core that are not contacts at check_alpha"));
  r.extra["minima_checked"] = checked;
  r.series.emplace_back("alpha_limit", std::move(series));
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_stationarity_cover(const ExperimentParams& params) {
  const std::string who = "cover";
  check_common(params, who);
  const auto cls = classify_contact_set(params.model, params.alpha);
  if (cls.contact_class != ContactClass::kPositiveLebesgue) {
    throw PreconditionError("cover: contact set is not of positive Lebesgue measure (" +
                            std::string(to_string(cls.contact_class)) + ")");
  }
  const auto start = Clock::now();
  const auto pk = p_k_zero(params.model, params.alpha);

  struct Record {
    std::uint64_t id = 0;
    std::size_t core = 0;
    std::size_t contacts = 0;
  };
  // The core is the central half of the window; a replicate with any
  // contaminated core index is rejected.
  const double half = 0.5 * params.window;
  auto sample = [&](std::uint64_t id) -> std::optional<Record> {
    thread_local MinorantResult res;
    const CadlagPath path = simulate_path(params.model, sim_config(params, id));
    compute_minorant(path, params.alpha, {}, res);
    Record rec{id, 0, 0};
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (std::abs(path.time(i)) > half) continue;
      if (res.contaminated[i]) return std::nullopt;
      ++rec.core;
      rec.contacts += res.contact_mask[i] ? 1 : 0;
    }
    return rec;
  };
  std::size_t attempted = 0;
  const auto records = collect_accepted<Record>(params, params.n, who, attempted, sample);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());

  std::vector<double> fractions;
  r.raw.columns = {"replicate", "core_points", "contact_points", "fraction"};
  for (const auto& rec : records) {
    const double f = static_cast<double>(rec.contacts) / static_cast<double>(rec.core);
    fractions.push_back(f);
    r.raw.rows.push_back({static_cast<double>(rec.id), static_cast<double>(rec.core),
                          static_cast<double>(rec.contacts), f});
  }
  const auto sum = stats::summarize(fractions);
  r.estimates.push_back({"coverage", sum.mean, sum.se, sum.n, pk.value});
  r.checks.push_back(make_check("coverage", std::abs(sum.mean - pk.value), 3.0 * sum.se + pk.error,
                                "|coverage - P(K = 0)| <= 3 SE + quadrature error"));
  r.extra["p_k_zero_integral"] = pk.integral;
  r.extra["p_k_zero_error"] = pk.error;
  r.extra["contact_class"] = to_string(cls.contact_class);
  r.runtime_seconds = seconds_since(start);
  return r;
}

ExperimentReport run_infimum_law(const ExperimentParams& params) {
  const std::string who = "infimum";
  check_common(params, who);
  require_brownian(params, who);
  const auto start = Clock::now();
  const auto scaling = unit_scaling(params);
  const double rate = oracle::neg_inf_exp_rates(scaling.params).first;
  const std::size_t steps = steps_per_side(params.window, params.dt);

  struct Record {
    std::uint64_t id = 0;
    double value = 0.0;
    double time = 0.0;
  };
  // On t <= 0, X_{-u} - alpha (-u) = alpha u - Y'(u) with Y' the reflected
  // half, so the quantity is max_u (Y'(u) - alpha u).
  auto sample = [&](std::uint64_t id) -> std::optional<Record> {
    thread_local HalfPath half;
    simulate_half(params.model, steps, params.dt, params.seed, id, 1, half);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
      const double v = half.y[k] - params.alpha * params.dt * static_cast<double>(k);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    if (arg == steps) return std::nullopt;
    return Record{id, best / scaling.value_scale, -params.dt * static_cast<double>(arg)};
  };
  std::size_t attempted = 0;
  const auto records = collect_accepted<Record>(params, params.n, who, attempted, sample);
  ExperimentReport r = start_report(who, params);
  finish_sampling(r, attempted, records.size());

  std::vector<double> xs;
  r.raw.columns = {"replicate", "neg_infimum", "time"};
  for (const auto& rec : records) {
    xs.push_back(rec.value);
    r.raw.rows.push_back({static_cast<double>(rec.id), rec.value, rec.time});
  }
  const auto sum = stats::summarize(xs);
  r.estimates.push_back({"mean", sum.mean, sum.se, sum.n, 1.0 / rate});
  const auto cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  const double ks = stats::ks_distance(xs, cdf);
  const double threshold =
      0.02 + (params.ks_allowance ? kKsAllowanceInfimum * std::sqrt(params.dt) : 0.0);
  r.checks.push_back(make_check("ks_infimum", ks, threshold, "KS against Exp(2 (alpha - beta))"));
  r.extra["ks_pvalue"] = stats::ks_pvalue(ks, xs.size());
  r.extra["rate"] = rate;
  r.series.emplace_back("infimum_cdf", cdf_series(xs, 5.0 / rate, cdf));
  r.runtime_seconds = seconds_since(start);
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"h",          "t_sign", "k_laplace", "recipe",
                                                 "alpha_limit", "cover",  "infimum"};
  return names;
}

ExperimentReport run_by_name(const std::string& name, const ExperimentParams& params,
                             const ExtraOptions& extra) {
  if (name == "h") return run_h_experiment(params);
  if (name == "t_sign") return run_t_sign(params);
  if (name == "k_laplace") return run_k_laplace(params, extra.theta_grid);
  if (name == "recipe") return run_recipe_check(params);
  if (name == "alpha_limit") return run_alpha_limit(params, extra.alpha_limit);
  if (name == "cover") return run_stationarity_cover(params);
  if (name == "infimum") return run_infimum_law(params);
  throw InputError("unknown experiment '" + name + "'");
}

}  // namespace lipminor::experiments
