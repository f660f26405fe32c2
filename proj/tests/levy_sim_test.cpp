#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipminor/error.hpp"
#include "lipminor/levy_model.hpp"
#include "lipminor/model_json.hpp"
#include "lipminor/numeric.hpp"
#include "lipminor/rng.hpp"
#include "lipminor/simulate.hpp"
#include "lipminor/stats.hpp"

namespace lipminor {
namespace {

using Block = std::array<std::uint32_t, 4>;

LevyModel two_point_cp(double drift, double sigma2 = 0.0) {
  return LevyModel{sigma2, drift, CompoundPoisson{1.0, TwoPointJumps{1.0, -1.0, 0.5}}};
}

// Chambers-Mallows-Stuck draw for exp(-|theta|^index).
double symmetric_stable_draw(std::mt19937_64& gen, double index) {
  std::uniform_real_distribution<double> u(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::exponential_distribution<double> e(1.0);
  const double v = u(gen);
  const double w = e(gen);
  return std::sin(index * v) / std::pow(std::cos(v), 1.0 / index) *
         std::pow(std::cos(v - index * v) / w, (1.0 - index) / index);
}

TEST(PhiloxTest, KnownAnswerVectors) {
  EXPECT_EQ(detail::philox_block({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(detail::philox_block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(detail::philox_block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(PhiloxTest, StreamMatchesScalarBlocks) {
  const StreamKey key{12345, 0x1234567890ULL, 1, 5};
  PhiloxStream stream(key);
  const std::uint64_t k = detail::splitmix64(key.seed);
  const std::array<std::uint32_t, 2> kw = {static_cast<std::uint32_t>(k),
                                           static_cast<std::uint32_t>(k >> 32)};
  const std::uint32_t tag = (1U << 31) | (5U << 24);
  for (std::uint32_t block = 0; block < 100; ++block) {
    const Block out = detail::philox_block(
        {block, tag, static_cast<std::uint32_t>(key.replicate),
         static_cast<std::uint32_t>(key.replicate >> 32)},
        kw);
    EXPECT_EQ(stream(), (static_cast<std::uint64_t>(out[1]) << 32) | out[0]) << block;
    EXPECT_EQ(stream(), (static_cast<std::uint64_t>(out[3]) << 32) | out[2]) << block;
  }
}

TEST(PhiloxTest, StreamsAreDistinct) {
  PhiloxStream a({1, 0, 0, 0});
  PhiloxStream b({1, 0, 0, 1});
  PhiloxStream c({1, 0, 1, 0});
  PhiloxStream d({1, 1, 0, 0});
  PhiloxStream e({2, 0, 0, 0});
  const std::uint64_t x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  EXPECT_NE(x, e());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform_open();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(LevyModelTest, ValidationRejectsBadParameters) {
  EXPECT_THROW(LevyModel::brownian(0.0, -1.0).validate(), ParameterError);
  EXPECT_THROW((LevyModel{1.0, std::nan(""), NoJumps{}}).validate(), ParameterError);
  EXPECT_THROW((LevyModel{0.0, 0.0, CompoundPoisson{0.0, TwoPointJumps{}}}).validate(),
               ParameterError);
  EXPECT_THROW((LevyModel{0.0, 0.0, CompoundPoisson{1.0, TwoPointJumps{1, -1, 1.5}}}).validate(),
               ParameterError);
  EXPECT_THROW((LevyModel{0.0, 0.0, CompoundPoisson{1.0, GaussianJumps{0, -1}}}).validate(),
               ParameterError);
  EXPECT_THROW((LevyModel{0.0, 0.0, SymmetricStable{2.0, 1.0}}).validate(), ParameterError);
  EXPECT_THROW((LevyModel{0.0, 0.0, SymmetricStable{1.5, 0.0}}).validate(), ParameterError);
  EXPECT_NO_THROW(two_point_cp(0.3).validate());
}

TEST(LevyModelTest, MeanAndExponent) {
  EXPECT_DOUBLE_EQ(eval_mean(LevyModel::brownian(0.4)), 0.4);
  const LevyModel cp{0.0, 0.1, CompoundPoisson{2.0, TwoPointJumps{1.0, -0.5, 0.25}}};
  EXPECT_DOUBLE_EQ(eval_mean(cp), 0.1 + 2.0 * (0.25 - 0.375));
  const std::complex<double> psi = eval_psi(LevyModel::brownian(0.4, 2.0), 1.5);
  EXPECT_NEAR(psi.real(), 0.5 * 2.0 * 2.25, 1e-14);
  EXPECT_NEAR(psi.imag(), -0.4 * 1.5, 1e-14);
  const std::complex<double> cpsi = eval_psi(two_point_cp(0.0), 0.7);
  EXPECT_NEAR(cpsi.real(), 1.0 - std::cos(0.7), 1e-14);
  EXPECT_NEAR(cpsi.imag(), 0.0, 1e-14);
}

TEST(MarginalTest, BrownianClosedForm) {
  const auto p = marginal_interval_prob(LevyModel::brownian(0.5, 4.0), 2.0, -1.0, 1.0);
  const double sd = std::sqrt(8.0);
  const double expected =
      0.5 * (std::erf((2.0 - 1.0) / (sd * std::sqrt(2.0))) -
             std::erf((-2.0 - 1.0) / (sd * std::sqrt(2.0))));
  EXPECT_NEAR(p.value, expected, 1e-14);
}

TEST(MarginalTest, TwoPointEnumeration) {
  // X_t = d t + (up count) - (down count); enumerate both Poisson counts.
  const double d = 0.3;
  for (double t : {0.25, 1.0, 3.0}) {
    for (auto [a, b] : {std::pair{-1.0, 1.0}, std::pair{0.0, 0.5}, std::pair{0.2, 2.0}}) {
      double expected = 0.0;
      const double half = 0.5 * t;
      for (int up = 0; up < 60; ++up) {
        for (int down = 0; down < 60; ++down) {
          const double x = d * t + up - down;
          if (x < a * t || x > b * t) continue;
          expected += std::exp(-t + (up + down) * std::log(half) - std::lgamma(up + 1.0) -
                               std::lgamma(down + 1.0));
        }
      }
      EXPECT_NEAR(marginal_interval_prob(two_point_cp(d), t, a, b).value, expected, 1e-12)
          << t << " [" << a << "," << b << "]";
    }
  }
}

TEST(MarginalTest, MixturesAgreeWithCharacteristicFunctionInversion) {
  const std::vector<LevyModel> models = {
      two_point_cp(0.2, 0.5),
      LevyModel{0.3, -0.1, CompoundPoisson{1.5, GaussianJumps{0.4, 0.8}}},
      LevyModel{0.2, 0.1, CompoundPoisson{1.0, SymmetricExponentialJumps{0.7}}},
  };
  for (const LevyModel& model : models) {
    for (double t : {0.1, 1.0}) {
      auto cf = [&](double th) { return std::exp(-t * eval_psi(model, th)); };
      const auto ref = numeric::invert_interval_probability(cf, -0.5 * t, 1.5 * t);
      ASSERT_TRUE(ref.converged);
      EXPECT_NEAR(marginal_interval_prob(model, t, -0.5, 1.5).value, ref.value, 1e-7)
          << model.describe() << " t=" << t;
    }
  }
}

TEST(MarginalTest, LaplaceWithoutGaussianMatchesMonteCarlo) {
  const LevyModel model{0.0, 0.2, CompoundPoisson{2.0, SymmetricExponentialJumps{0.5}}};
  std::mt19937_64 gen(3);
  std::poisson_distribution<int> count(2.0);
  std::exponential_distribution<double> expo(2.0);
  std::bernoulli_distribution sign(0.5);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    double x = 0.2;
    for (int k = count(gen); k > 0; --k) x += sign(gen) ? expo(gen) : -expo(gen);
    if (x >= 0.1 && x <= 1.0) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  const auto est = marginal_interval_prob(model, 1.0, 0.1, 1.0);
  EXPECT_NEAR(est.value, p, 4.0 * stats::binomial_se(p, n));
  // The no-jump atom at the drift is included.
  const auto atom = marginal_interval_prob(model, 1.0, 0.2, 0.2);
  EXPECT_NEAR(atom.value, std::exp(-2.0), 1e-12);
}

TEST(MarginalTest, StableMatchesMonteCarlo) {
  const LevyModel model{0.0, 0.0, SymmetricStable{1.5, 1.0}};
  std::mt19937_64 gen(4);
  const int n = 200000;
  int hits = 0;
  const double t = 2.0;
  const double s = std::pow(t, 1.0 / 1.5);
  for (int i = 0; i < n; ++i) {
    const double x = s * symmetric_stable_draw(gen, 1.5);
    if (x >= -0.5 * t && x <= 1.0 * t) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  EXPECT_NEAR(marginal_interval_prob(model, t, -0.5, 1.0).value, p,
              4.0 * stats::binomial_se(p, n));
}

TEST(MarginalTest, RejectsBadArguments) {
  EXPECT_THROW((void)marginal_interval_prob(LevyModel::brownian(0), 0.0, 0, 1), ParameterError);
  EXPECT_THROW((void)marginal_interval_prob(LevyModel::brownian(0), 1.0, 1, 0), ParameterError);
}

TEST(ModelJsonTest, RoundTripsAllJumpTypes) {
  const std::vector<LevyModel> models = {
      LevyModel::brownian(0.25, 2.0),
      two_point_cp(0.1),
      LevyModel{0.0, 0.0, CompoundPoisson{3.0, GaussianJumps{1.0, 0.5}}},
      LevyModel{1.0, 0.0, CompoundPoisson{0.5, SymmetricExponentialJumps{2.0}}},
      LevyModel{0.5, -0.2, SymmetricStable{1.25, 0.75}},
  };
  for (const LevyModel& m : models) {
    const nlohmann::json j = model_to_json(m);
    EXPECT_EQ(model_to_json(model_from_json(j)), j);
    EXPECT_EQ(model_to_json(parse_model_spec(j.dump())), j);
  }
}

TEST(ModelJsonTest, StrictParsing) {
  EXPECT_THROW((void)parse_model_spec(R"({"sigma2": 1, "drift": 0, "volatility": 2})"),
               InputError);
  EXPECT_THROW((void)parse_model_spec(R"({"sigma2": 1})"), InputError);
  EXPECT_THROW((void)parse_model_spec(R"({"schema": 2, "sigma2": 1, "drift": 0})"), InputError);
  EXPECT_THROW((void)parse_model_spec(R"({"sigma2": "1", "drift": 0})"), InputError);
  EXPECT_THROW(
      (void)parse_model_spec(
          R"({"sigma2": 0, "drift": 0, "jumps": {"type": "compound_poisson", "rate": 1}})"),
      InputError);
  EXPECT_THROW((void)parse_model_spec(R"({"sigma2": 0, "drift": 0, "jumps": {"type": "gamma"}})"),
               InputError);
  EXPECT_THROW((void)parse_model_spec("{not json"), InputError);
  EXPECT_THROW((void)parse_model_spec("/nonexistent/model.json"), InputError);
  EXPECT_THROW((void)parse_model_spec(R"({"sigma2": -1, "drift": 0})"), InputError);
  const LevyModel m = parse_model_spec(R"({"sigma2": 1, "drift": 0.5})");
  EXPECT_FALSE(m.has_jumps());
  EXPECT_EQ(m.drift, 0.5);
}

TEST(SimulateTest, StepsPerSide) {
  EXPECT_EQ(steps_per_side(20.0, 1e-3), 20000u);
  EXPECT_EQ(steps_per_side(2.0, 0.01), 200u);
  EXPECT_THROW((void)steps_per_side(1.0, 0.3), ParameterError);
  EXPECT_THROW((void)steps_per_side(1.0, 0.0), ParameterError);
  EXPECT_THROW((void)steps_per_side(-1.0, 0.1), ParameterError);
  EXPECT_THROW((void)steps_per_side(1e6, 1e-6), ParameterError);
}

TEST(SimulateTest, GridOriginAndDeterminism) {
  const LevyModel model = two_point_cp(0.1, 1.0);
  const CadlagPath a = simulate_path(model, {2.0, 0.01, 7, 3});
  const CadlagPath b = simulate_path(model, {2.0, 0.01, 7, 3});
  const CadlagPath c = simulate_path(model, {2.0, 0.01, 7, 4});
  ASSERT_EQ(a.size(), 401u);
  ASSERT_EQ(a.origin_index(), std::optional<std::size_t>{200});
  EXPECT_EQ(a.value(200), 0.0);
  EXPECT_DOUBLE_EQ(a.time(0), -2.0);
  EXPECT_DOUBLE_EQ(a.time(400), 2.0);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.value(i), b.value(i));
    differs = differs || a.value(i) != c.value(i);
  }
  EXPECT_TRUE(differs);
  ASSERT_EQ(a.jumps().size(), b.jumps().size());
}

TEST(SimulateTest, BrownianIncrementMoments) {
  const LevyModel model = LevyModel::brownian(0.3, 2.0);
  std::vector<double> right, left;
  HalfPath half;
  for (std::uint64_t rep = 0; rep < 4000; ++rep) {
    simulate_half(model, 100, 0.01, 21, rep, 0, half);
    right.push_back(half.y[100]);
  }
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const CadlagPath p = simulate_path(model, {1.0, 0.01, 22, rep});
    left.push_back(p.value(0));
  }
  const auto r = stats::summarize(right);
  EXPECT_NEAR(r.mean, 0.3, 4.0 * r.se);
  EXPECT_NEAR(r.variance, 2.0, 4.0 * 2.0 * std::sqrt(2.0 / 4000.0));
  const auto l = stats::summarize(left);
  EXPECT_NEAR(l.mean, -0.3, 4.0 * l.se);
}

TEST(SimulateTest, CompoundPoissonJumpsAreMarked) {
  const LevyModel model = two_point_cp(0.0);
  double total = 0.0;
  const int reps = 200;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const CadlagPath p = simulate_path(model, {10.0, 0.01, 8, rep});
    total += static_cast<double>(p.jumps().size());
    for (const JumpMark& j : p.jumps()) {
      const double size = p.value(j.index) - j.left_value;
      EXPECT_NE(size, 0.0);
      EXPECT_NEAR(size, std::round(size), 1e-12);
      if (j.index > 0) EXPECT_EQ(j.left_value, p.value(j.index - 1));
    }
  }
  // Poisson count over [-10, 10]; cells merging two jumps are rare at rate 1.
  const double mean = total / reps;
  EXPECT_NEAR(mean, 20.0, 4.0 * std::sqrt(20.0 / reps) + 0.1);
}

TEST(SimulateTest, StableMarginalMatchesOracle) {
  const LevyModel model{0.0, 0.0, SymmetricStable{1.5, 1.0}};
  HalfPath half;
  const int n = 20000;
  int hits = 0;
  for (std::uint64_t rep = 0; rep < static_cast<std::uint64_t>(n); ++rep) {
    simulate_half(model, 4, 0.25, 31, rep, 0, half);
    if (half.y[4] >= -1.0 && half.y[4] <= 0.5) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  EXPECT_NEAR(p, marginal_interval_prob(model, 1.0, -1.0, 0.5).value,
              4.0 * stats::binomial_se(p, n));
}

}  // namespace
}  // namespace lipminor
