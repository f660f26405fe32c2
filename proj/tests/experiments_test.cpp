#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lipminor/error.hpp"
#include "lipminor/experiments.hpp"
#include "lipminor/minorant.hpp"
#include "lipminor/report.hpp"
#include "lipminor/simulate.hpp"
#include "lipminor/stats.hpp"

namespace lipminor::experiments {
namespace {

ExperimentParams small_params(double alpha, double beta) {
  ExperimentParams p;
  p.model = LevyModel::brownian(beta);
  p.alpha = alpha;
  p.window = 20.0;
  p.dt = 0.01;
  p.n = 400;
  p.seed = 77;
  return p;
}

LevyModel two_point_cp() {
  return LevyModel{0.0, 0.0, CompoundPoisson{1.0, TwoPointJumps{1.0, -1.0, 0.5}}};
}

TEST(ExperimentParamsTest, WindowRule) {
  EXPECT_DOUBLE_EQ(minimum_window(LevyModel::brownian(0.5), 1.5), 20.0);
  EXPECT_THROW((void)minimum_window(LevyModel::brownian(1.0), 1.0), ParameterError);
  ExperimentParams p = small_params(1.5, 1.0);
  p.window = 20.0;
  try {
    (void)run_t_sign(p);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("window"), std::string::npos) << e.what();
  }
}

TEST(ExperimentParamsTest, RejectsBadArguments) {
  ExperimentParams p = small_params(1.0, 0.0);
  p.n = 0;
  EXPECT_THROW((void)run_t_sign(p), ParameterError);
  p = small_params(1.0, 0.0);
  p.n = 999;
  EXPECT_THROW((void)run_h_experiment(p), ParameterError);
  p = small_params(0.0, 0.0);
  EXPECT_THROW((void)run_t_sign(p), ParameterError);
  p = small_params(1.0, 0.0);
  p.dt = 0.03;
  EXPECT_THROW((void)run_t_sign(p), ParameterError);
  p.dt = 0.01;
  p.model = two_point_cp();
  p.alpha = 0.5;
  p.window = 40.0;
  EXPECT_THROW((void)run_t_sign(p), ParameterError);
  EXPECT_THROW((void)run_alpha_limit(p), ParameterError);
  p = small_params(1.0, 0.0);
  EXPECT_THROW((void)run_stationarity_cover(p), PreconditionError);
  EXPECT_THROW((void)run_k_laplace(p, {}), ParameterError);
  EXPECT_THROW((void)run_k_laplace(p, {-1.0}), ParameterError);
  EXPECT_THROW((void)run_by_name("nope", p), InputError);
}

TEST(ExperimentTest, LowAcceptanceAborts) {
  ExperimentParams p;
  p.model = LevyModel{0.0, 0.0, SymmetricStable{1.2, 20.0}};
  p.alpha = 1.0;
  p.window = 20.0;
  p.dt = 0.01;
  p.n = 200;
  p.seed = 1;
  try {
    (void)run_recipe_check(p);
    FAIL() << "expected ContaminationError";
  } catch (const ContaminationError& e) {
    EXPECT_NE(std::string(e.what()).find("--window"), std::string::npos) << e.what();
  }
}

TEST(ExperimentTest, DeterministicAcrossThreadCounts) {
  ExperimentParams p = small_params(1.5, 0.5);
  p.threads = 1;
  const std::string one = run_t_sign(p).to_json().dump();
  p.threads = 3;
  const ExperimentReport three = run_t_sign(p);
  EXPECT_EQ(three.to_json().dump(), one);
  EXPECT_EQ(three.accepted, 400u);
  EXPECT_EQ(three.raw.rows.size(), 400u);
  p.seed = 78;
  EXPECT_NE(run_t_sign(p).to_json().dump(), one);
}

TEST(ExperimentTest, ApexSignFlipsWithDrift) {
  // Same seed and reflected drift: the path of -beta is the mirror image of
  // the path of beta up to the noise, so the two fractions sum to about one.
  const ExperimentReport plus = run_t_sign(small_params(2.0, 1.0));
  const ExperimentReport minus = run_t_sign(small_params(2.0, -1.0));
  const Estimate* a = plus.find_estimate("p_t_positive");
  const Estimate* b = minus.find_estimate("p_t_positive");
  ASSERT_NE(a, nullptr);
  ASSERT_NE(b, nullptr);
  EXPECT_NEAR(*a->oracle, 0.75, 1e-15);
  EXPECT_NEAR(a->value + b->value, 1.0, 3.0 * std::hypot(a->se, b->se));
  const ExperimentReport zero = run_t_sign(small_params(1.0, 0.0));
  EXPECT_NEAR(zero.find_estimate("p_t_positive")->value, 0.5,
              3.0 * zero.find_estimate("p_t_positive")->se);
}

TEST(ExperimentTest, KLaplaceAtZeroIsOne) {
  ExperimentParams p = small_params(1.0, 0.0);
  p.n = 300;
  const ExperimentReport r = run_k_laplace(p, {0.0, 1.0});
  const Estimate* zero = r.find_estimate("laplace_theta=0");
  ASSERT_NE(zero, nullptr);
  EXPECT_EQ(zero->value, 1.0);
  EXPECT_EQ(zero->se, 0.0);
  const Check* grid = r.find_check("k_at_least_grid_step");
  ASSERT_NE(grid, nullptr);
  EXPECT_TRUE(grid->pass);
  ASSERT_NE(r.find_check("laplace_theta=1"), nullptr);
  ASSERT_NE(r.find_check("k_density_bins"), nullptr);
}

TEST(ExperimentTest, RecipeOrdering) {
  ExperimentParams p = small_params(1.0, 0.3);
  p.window = 30.0;
  p.n = 300;
  const ExperimentReport r = run_recipe_check(p);
  EXPECT_TRUE(r.find_check("ordered")->pass);
  EXPECT_TRUE(r.find_check("e_matches_d")->pass);
}

TEST(ExperimentTest, AlphaLimitNesting) {
  ExperimentParams p = small_params(1.0, 0.0);
  p.n = 20;
  const ExperimentReport r = run_alpha_limit(p);
  EXPECT_EQ(r.find_check("nesting_violations")->statistic, 0.0);
  EXPECT_TRUE(r.find_check("minima_are_contacts")->pass);
  AlphaLimitOptions bad;
  bad.alpha_list = {2.0, 1.0};
  EXPECT_THROW((void)run_alpha_limit(p, bad), ParameterError);
  bad = {};
  bad.check_stride = 7;
  EXPECT_THROW((void)run_alpha_limit(p, bad), ParameterError);
}

TEST(ExperimentTest, CoverGrowsWithSlope) {
  ExperimentParams p;
  p.model = two_point_cp();
  p.window = 40.0;
  p.dt = 0.01;
  p.n = 200;
  p.seed = 5;
  p.alpha = 0.5;
  const ExperimentReport low = run_stationarity_cover(p);
  p.alpha = 0.6;
  const ExperimentReport high = run_stationarity_cover(p);
  const Estimate* a = low.find_estimate("coverage");
  const Estimate* b = high.find_estimate("coverage");
  EXPECT_LT(a->value, b->value);
  EXPECT_LT(*a->oracle, *b->oracle);
  EXPECT_TRUE(low.find_check("coverage")->pass);
}

TEST(ExperimentTest, BrownianContactFractionVanishesWithGrid) {
  double fraction[2] = {0.0, 0.0};
  const double steps[2] = {0.01, 0.0025};
  for (int k = 0; k < 2; ++k) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const CadlagPath path = simulate_path(LevyModel::brownian(0.0), {20.0, steps[k], 3, rep});
      const MinorantResult m = compute_minorant(path, 1.0);
      fraction[k] += static_cast<double>(m.contact_count()) / static_cast<double>(path.size());
    }
  }
  EXPECT_LT(fraction[1], 0.75 * fraction[0]);
}

TEST(ExperimentTest, InfimumLaw) {
  // At dt = 0.01 the grid bias at zero alone (about 1.17 sqrt(dt)) nearly
  // fills the threshold, so use a finer grid.
  ExperimentParams p = small_params(1.0, 0.0);
  p.dt = 1e-3;
  p.n = 2000;
  const ExperimentReport r = run_infimum_law(p);
  const Check* ks = r.find_check("ks_infimum");
  EXPECT_TRUE(ks->pass) << ks->statistic << " > " << ks->threshold;
  EXPECT_EQ(r.raw.rows.size(), 2000u);
  EXPECT_NEAR(*r.find_estimate("mean")->oracle, 0.5, 1e-15);
}

TEST(ExperimentTest, RunByNameCoversAll) {
  for (const std::string& name : experiment_names()) {
    SCOPED_TRACE(name);
    ExperimentParams p = small_params(1.0, 0.0);
    p.n = name == "h" ? 1000 : 50;
    ExtraOptions extra;
    if (name == "cover") {
      p.model = two_point_cp();
      p.alpha = 0.5;
      p.window = 40.0;
    }
    const ExperimentReport r = run_by_name(name, p, extra);
    EXPECT_EQ(r.name, name);
    EXPECT_FALSE(r.checks.empty());
    EXPECT_EQ(r.to_json()["params"], r.params);
  }
}

TEST(WorkerCountTest, HonoursEnvironmentCap) {
  ::setenv("LIPMINOR_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1u);
  ::unsetenv("LIPMINOR_THREADS");
  EXPECT_GE(worker_count(), 1u);
}

TEST(ReportTest, WritesFilesWithProvenance) {
  const auto dir = std::filesystem::temp_directory_path() / "lipminor_report_test";
  std::filesystem::remove_all(dir);
  ExperimentParams p = small_params(1.0, 0.0);
  p.n = 50;
  const ExperimentReport r = run_infimum_law(p);
  const nlohmann::json config = {{"subcommand", "experiment"}};
  const auto files = report::write_experiment(dir, r, config);
  for (const char* name : {"report.json", "raw.csv", "timing.json", "infimum_cdf.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_EQ(files.size(), 4u);
  std::ifstream csv(dir / "raw.csv");
  std::string first;
  std::getline(csv, first);
  EXPECT_EQ(first.rfind("# {", 0), 0u);
  EXPECT_NE(first.find("\"version\""), std::string::npos);
  std::ifstream js(dir / "report.json");
  const nlohmann::json j = nlohmann::json::parse(js);
  EXPECT_EQ(j["provenance"]["run_config"], config);
  EXPECT_FALSE(j.contains("runtime_seconds"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lipminor::experiments
