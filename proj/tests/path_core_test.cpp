#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "lipminor/error.hpp"
#include "lipminor/minorant.hpp"
#include "lipminor/path.hpp"
#include "lipminor/path_csv.hpp"
#include "lipminor/simulate.hpp"

namespace lipminor {
namespace {

// Quadratic-time reference: m_i = min_j (lower_j + alpha |t_i - t_j|).
std::vector<double> brute_force_minorant(const CadlagPath& path, double alpha) {
  const std::size_t n = path.size();
  std::vector<double> m(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i] = std::min(m[i], path.lower_value(j) + alpha * std::abs(path.time(i) - path.time(j)));
    }
  }
  return m;
}

CadlagPath random_path(std::mt19937_64& gen, std::size_t n, bool with_jumps) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> gap(0.01, 1.0);
  std::bernoulli_distribution jump(0.1);
  std::vector<double> t(n), v(n);
  std::vector<JumpMark> jumps;
  t[0] = -gap(gen) * static_cast<double>(n) / 2.0;
  v[0] = normal(gen);
  for (std::size_t i = 1; i < n; ++i) {
    t[i] = t[i - 1] + gap(gen);
    v[i] = v[i - 1] + normal(gen);
    if (with_jumps && jump(gen)) {
      const double left = v[i] + 3.0 * normal(gen);
      if (left != v[i]) jumps.push_back({i, left});
    }
  }
  return CadlagPath(std::move(t), std::move(v), std::move(jumps));
}

CadlagPath grid_path(std::vector<double> values, double dt) {
  const std::size_t n = values.size();
  std::vector<double> t(n);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(static_cast<std::ptrdiff_t>(i) - half) * dt;
  }
  return CadlagPath(std::move(t), std::move(values));
}

TEST(CadlagPathTest, RejectsInvalidInput) {
  EXPECT_THROW(CadlagPath({0.0}, {1.0}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 1.0}, {1.0}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 0.0}, {1.0, 2.0}), InputError);
  EXPECT_THROW(CadlagPath({1.0, 0.0}, {1.0, 2.0}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 1.0}, {1.0, std::nan("")}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 1.0}, {1.0, 2.0}, {{2, 0.0}}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0}, {{2, 0.0}, {1, 0.0}}), InputError);
  EXPECT_THROW(CadlagPath({0.0, 1.0}, {1.0, 2.0}, {{1, 2.0}}), InputError);
}

TEST(CadlagPathTest, LowerValueUsesLeftLimit) {
  const CadlagPath path({-1.0, 0.0, 1.0}, {0.0, 2.0, 1.0}, {{1, -1.0}, {2, 5.0}});
  ASSERT_TRUE(path.origin_index().has_value());
  EXPECT_EQ(*path.origin_index(), 1u);
  EXPECT_EQ(path.lower_value(0), 0.0);
  EXPECT_EQ(path.lower_value(1), -1.0);
  EXPECT_EQ(path.lower_value(2), 1.0);
  EXPECT_FALSE(path.left_value(0).has_value());
  EXPECT_EQ(*path.left_value(2), 5.0);
}

TEST(CadlagPathTest, SampleIndexAtClamps) {
  const CadlagPath path({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0});
  EXPECT_EQ(path.sample_index_at(-5.0), 0u);
  EXPECT_EQ(path.sample_index_at(0.5), 0u);
  EXPECT_EQ(path.sample_index_at(1.0), 1u);
  EXPECT_EQ(path.sample_index_at(9.0), 2u);
  EXPECT_EQ(path.origin_index(), std::optional<std::size_t>{0});
}

TEST(MinorantTest, MatchesBruteForceOnRandomPaths) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> alpha_dist(0.05, 5.0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 200);
    const CadlagPath path = random_path(gen, n, rep % 2 == 1);
    const double alpha = alpha_dist(gen);
    const MinorantResult res = compute_minorant(path, alpha);
    const std::vector<double> ref = brute_force_minorant(path, alpha);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(res.m[i], ref[i], 1e-12 * std::max(1.0, std::abs(ref[i])))
          << "rep " << rep << " index " << i;
    }
  }
}

TEST(MinorantTest, DominatedAndLipschitz) {
  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 50; ++rep) {
    const CadlagPath path = random_path(gen, 300, true);
    const double alpha = 0.5 + rep * 0.1;
    const MinorantResult res = compute_minorant(path, alpha);
    for (std::size_t i = 0; i < path.size(); ++i) {
      EXPECT_LE(res.m[i], path.lower_value(i) + 1e-12);
      if (i > 0) {
        const double slope =
            std::abs(res.m[i] - res.m[i - 1]) / (path.time(i) - path.time(i - 1));
        EXPECT_LE(slope, alpha * (1.0 + 1e-9));
      }
    }
  }
}

TEST(MinorantTest, IdempotentOnItsOwnOutput) {
  std::mt19937_64 gen(13);
  const CadlagPath path = random_path(gen, 400, true);
  const MinorantResult first = compute_minorant(path, 1.3);
  const CadlagPath as_path(std::vector<double>(path.times().begin(), path.times().end()),
                           first.m);
  const MinorantResult second = compute_minorant(as_path, 1.3);
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_NEAR(second.m[i], first.m[i], 1e-12);
    EXPECT_TRUE(second.is_contact(i));
  }
}

TEST(MinorantTest, ContactSetsNestInAlpha) {
  std::mt19937_64 gen(14);
  for (int rep = 0; rep < 20; ++rep) {
    const CadlagPath path = random_path(gen, 500, rep % 2 == 0);
    const MinorantResult low = compute_minorant(path, 0.7);
    const MinorantResult high = compute_minorant(path, 2.1);
    for (std::size_t i = 0; i < path.size(); ++i) {
      EXPECT_LE(low.m[i], high.m[i] + 1e-12);
      if (low.is_contact(i)) EXPECT_TRUE(high.is_contact(i)) << "index " << i;
    }
  }
}

TEST(MinorantTest, ShiftEquivariant) {
  std::mt19937_64 gen(15);
  std::vector<double> values(801);
  std::normal_distribution<double> normal(0.0, 0.05);
  values[0] = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) values[i] = values[i - 1] + normal(gen);
  const CadlagPath path = grid_path(values, 0.0078125);
  const CadlagPath moved = path.shifted(0.5, 3.25);
  const MinorantResult a = compute_minorant(path, 1.0);
  const MinorantResult b = compute_minorant(moved, 1.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_NEAR(b.m[i], a.m[i] + 3.25, 1e-12);
    EXPECT_EQ(a.is_contact(i), b.is_contact(i));
  }
}

TEST(MinorantTest, FlowLocalityAfterContact) {
  // Replacing the path right of a contact c by the ray m(c) - alpha (t - c)
  // leaves the minorant left of c unchanged.
  std::mt19937_64 gen(16);
  const CadlagPath path = random_path(gen, 600, false);
  const double alpha = 1.0;
  const MinorantResult res = compute_minorant(path, alpha);
  std::size_t c = 0;
  for (std::size_t i = path.size() / 2; i < path.size(); ++i) {
    if (res.is_contact(i)) {
      c = i;
      break;
    }
  }
  ASSERT_GT(c, 0u);
  std::vector<double> v(path.values().begin(), path.values().end());
  for (std::size_t i = c + 1; i < v.size(); ++i) {
    v[i] = res.m[c] - alpha * (path.time(i) - path.time(c));
  }
  const CadlagPath cut(std::vector<double>(path.times().begin(), path.times().end()), v);
  const MinorantResult cut_res = compute_minorant(cut, alpha);
  for (std::size_t i = 0; i <= c; ++i) EXPECT_NEAR(cut_res.m[i], res.m[i], 1e-12);
}

TEST(MinorantTest, ConstantPathIsAllContact) {
  const CadlagPath path = grid_path(std::vector<double>(21, 3.0), 0.25);
  const MinorantResult res = compute_minorant(path, 2.0, {0.0, analytic_tolerance(path)});
  EXPECT_EQ(res.contact_count(), path.size());
  const auto runs = extract_contact_set(res);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0], (IndexRun{0, 20}));
}

TEST(MinorantTest, TentTouchesOnlyAtApexForSmallSlope) {
  const CadlagPath path({-2.0, -1.0, 0.0, 1.0, 2.0}, {2.0, 1.0, 0.0, 1.0, 2.0});
  const MinorantResult res = compute_minorant(path, 0.5, {0.0, analytic_tolerance(path)});
  const std::vector<double> expected = {1.0, 0.5, 0.0, 0.5, 1.0};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(res.m[i], expected[i]);
  EXPECT_EQ(res.contact_count(), 1u);
  EXPECT_TRUE(res.is_contact(2));
  const MinorantResult steep = compute_minorant(path, 1.0, {0.0, analytic_tolerance(path)});
  EXPECT_EQ(steep.contact_count(), 5u);
}

TEST(MinorantTest, JumpUsesSmallerOneSidedLimit) {
  const CadlagPath path({-1.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {{1, -2.0}});
  const MinorantResult res = compute_minorant(path, 1.0, {0.0, 1e-12});
  EXPECT_DOUBLE_EQ(res.m[1], -2.0);
  EXPECT_DOUBLE_EQ(res.m[0], -1.0);
  EXPECT_TRUE(res.is_contact(1));
  EXPECT_FALSE(res.is_contact(0));
}

TEST(MinorantTest, RejectsBadArguments) {
  const CadlagPath path({0.0, 1.0}, {0.0, 0.0});
  EXPECT_THROW((void)compute_minorant(path, 0.0), ParameterError);
  EXPECT_THROW((void)compute_minorant(path, -1.0), ParameterError);
  EXPECT_THROW((void)compute_minorant(path, 1.0, {-1.0, 0.0}), ParameterError);
}

TEST(MinorantTest, GuardMarksApexesNearBoundary) {
  // A path whose lowest point is the left end: every index is carried by that
  // apex and is contaminated.
  std::vector<double> v(101);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 10.0 * static_cast<double>(i) / 100.0;
  const CadlagPath path = grid_path(v, 0.01);
  const MinorantResult res = compute_minorant(path, 0.5, {0.1, 1e-12});
  for (std::size_t i = 0; i < path.size(); ++i) EXPECT_TRUE(res.is_contaminated(i));
  EXPECT_TRUE(extract_contact_set(res).empty());
  EXPECT_THROW((void)straddle_interval(path, res), ContaminationError);
}

TEST(StraddleTest, SymmetricValleyHasApexAtZero) {
  // Contacts at -1 and 1 with a peak at 0.
  std::vector<double> t, v;
  for (int i = -300; i <= 300; ++i) {
    const double x = i / 100.0;
    t.push_back(x);
    v.push_back(std::abs(x) <= 1.0 ? 1.0 - std::abs(x) : 2.0 * (std::abs(x) - 1.0));
  }
  const CadlagPath path(t, v);
  const MinorantResult res = compute_minorant(path, 0.5, {0.2, 1e-12});
  const StraddleInterval s = straddle_interval(path, res);
  EXPECT_FALSE(s.degenerate);
  EXPECT_DOUBLE_EQ(s.g, -1.0);
  EXPECT_DOUBLE_EQ(s.d, 1.0);
  EXPECT_DOUBLE_EQ(s.k, 2.0);
  EXPECT_NEAR(s.t, 0.0, 1e-12);
  EXPECT_NEAR(s.h, 1.0 - 0.5, 1e-12);
  EXPECT_NEAR(s.l + s.r, s.k, 1e-12);
  EXPECT_TRUE(sawtooth_check(path, res).all_pass());
}

TEST(StraddleTest, OriginContactIsDegenerate) {
  const CadlagPath path({-2.0, -1.0, 0.0, 1.0, 2.0}, {2.0, 1.0, 0.0, 1.0, 2.0});
  const MinorantResult res = compute_minorant(path, 0.5, {0.0, 1e-12});
  const StraddleInterval s = straddle_interval(path, res);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.k, 0.0);
  EXPECT_EQ(s.h, 0.0);
}

TEST(StraddleTest, MatchesDirectContactScanOnBrownianPaths) {
  const LevyModel model = LevyModel::brownian(0.3);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const CadlagPath path = simulate_path(model, {20.0, 0.01, 99, rep});
    const MinorantResult res = compute_minorant(path, 1.0);
    const std::size_t o = *path.origin_index();
    std::ptrdiff_t g = -1, d = -1;
    for (std::size_t i = o; i-- > 0;) {
      if (res.is_contact(i)) {
        g = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    for (std::size_t i = o + 1; i < path.size(); ++i) {
      if (res.is_contact(i)) {
        d = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    StraddleInterval s;
    try {
      s = straddle_interval(path, res);
    } catch (const ContaminationError&) {
      continue;
    }
    if (s.degenerate) continue;
    EXPECT_EQ(s.g, path.time(static_cast<std::size_t>(g)));
    EXPECT_EQ(s.d, path.time(static_cast<std::size_t>(d)));
    EXPECT_LE(s.g, s.t);
    EXPECT_LE(s.t, s.d);
    EXPECT_GE(s.h, 0.0);
    EXPECT_TRUE(sawtooth_check(path, res).all_pass());
  }
}

TEST(RecipeTest, EndPointAgreesWithD) {
  const LevyModel model = LevyModel::brownian(0.0);
  int compared = 0;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    const CadlagPath path = simulate_path(model, {20.0, 0.005, 5, rep});
    const MinorantResult res = compute_minorant(path, 1.0);
    StraddleInterval s;
    RecipeResult r;
    try {
      s = straddle_interval(path, res);
      r = recipe_d(path, 1.0);
    } catch (const ContaminationError&) {
      continue;
    }
    if (s.degenerate) continue;
    ++compared;
    EXPECT_NEAR(r.e, s.d, 0.005 + 1e-12);
    EXPECT_LE(s.t, r.s + 0.005);
    EXPECT_LE(r.s, r.e);
  }
  EXPECT_GT(compared, 30);
}

TEST(RecipeTest, UpwardJumpAtFirstPassageViolatesPrecondition) {
  // Left side sits at 0; the path jumps up at t = 1 from below the ray.
  const CadlagPath path({-2.0, -1.0, 0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 5.0, 6.0, 7.0},
                        {{3, -3.0}});
  EXPECT_THROW((void)recipe_d(path, 1.0), PreconditionError);
}

TEST(SawtoothTest, DetectsNonSawtoothGap) {
  const CadlagPath path({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
  MinorantResult fake = compute_minorant(path, 1.0, {0.0, 1e-12});
  fake.m[1] = 0.2;
  fake.contact_mask = {1, 0, 1};
  const SawtoothReport report = sawtooth_check(path, fake);
  ASSERT_EQ(report.gaps.size(), 1u);
  EXPECT_FALSE(report.all_pass());
  EXPECT_NEAR(report.gaps[0].max_deviation, 0.8, 1e-12);
}

TEST(PathCsvTest, RoundTripsExactly) {
  std::mt19937_64 gen(17);
  const CadlagPath path = random_path(gen, 100, true);
  std::stringstream ss;
  write_path_csv(ss, path, "note");
  const CadlagPath back = read_path_csv(ss);
  ASSERT_EQ(back.size(), path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_EQ(back.time(i), path.time(i));
    EXPECT_EQ(back.value(i), path.value(i));
    EXPECT_EQ(back.left_value(i), path.left_value(i));
  }
}

TEST(PathCsvTest, ReportsLineNumbers) {
  std::istringstream bad("t,value,left_value\n0,1,\n1,abc,\n");
  try {
    (void)read_path_csv(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream unordered("# c\nt,value,left_value\n0,1,\n0,2,\n");
  try {
    (void)read_path_csv(unordered);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  std::istringstream no_header("0,1,\n1,2,\n");
  EXPECT_THROW((void)read_path_csv(no_header), InputError);
}

TEST(PathCsvTest, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  const double x = 0.30940107675850306;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(PathCsvTest, MinorantCsvHasFlags) {
  const CadlagPath path({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
  const MinorantResult res = compute_minorant(path, 0.5, {0.0, 1e-12});
  std::ostringstream out;
  write_minorant_csv(out, path, res);
  EXPECT_EQ(out.str(), "t,m,contact,contaminated\n-1,0.5,0,0\n0,0,1,0\n1,0.5,0,0\n");
}

}  // namespace
}  // namespace lipminor
