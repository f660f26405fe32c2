#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lipminor/levy_model.hpp"

namespace lipminor {

struct ExistenceResult {
  bool exists = false;
  // Pure drift with |d| = alpha: the path is its own minorant.
  bool degenerate = false;
  std::string reason;
};

// The minorant exists iff E|X_1| < inf and |E X_1| < alpha, plus the
// degenerate line X_t = +-alpha t.
[[nodiscard]] ExistenceResult existence_check(const LevyModel& model, double alpha);

enum class Verdict { kConverged, kDiverged, kIndeterminate };
[[nodiscard]] const char* to_string(Verdict v);

// t -> P{X_t in [a t, b t]} for a fixed interval.
using MarginalFunction = std::function<ProbabilityEstimate(double t)>;

struct IntegralTestOptions {
  double t_min = 0x1.0p-20;
  // Levels are added beyond t_min while the diagnosis is inconclusive, up to
  // this many in total.
  int max_levels = 60;
  // Consecutive level ratios >= threshold over `window` levels => diverged.
  double ratio_threshold = 0.9;
  int window = 6;
};

// Diagnosis of int_0^1 t^-1 P{X_t in [a t, b t]} dt from its contributions on
// the dyadic levels [2^-(k+1), 2^-k].
struct IntegralVerdict {
  Verdict verdict = Verdict::kIndeterminate;
  bool diverged = false;
  // Converged: integral over [t_min, 1] plus a geometric tail estimate.
  // Otherwise: integral over [t_min, 1] only.
  double estimate = 0.0;
  double truncated_estimate = 0.0;  // over [t_min, 1]
  double tail_estimate = 0.0;
  // Fitted gamma in level_k ~ C 2^{-gamma k} over the diagnostic window;
  // gamma <= 0 means no decay.
  double divergence_exponent = 0.0;
  double standard_error = 0.0;  // quadrature and marginal error, summed
  double t_min = 0.0;
  std::vector<double> level_contributions;
  std::string diagnostics;
};

[[nodiscard]] IntegralVerdict integral_test(const MarginalFunction& marginal,
                                            const IntegralTestOptions& options = {});
[[nodiscard]] IntegralVerdict integral_test(const LevyModel& model, double a, double b,
                                            const IntegralTestOptions& options = {});

// Rogozin: zero is regular for (-inf, 0] iff int_0^1 t^-1 P{X_t <= 0} dt = inf.
struct RegularityResult {
  IntegralVerdict verdict;
  bool regular = false;
};
[[nodiscard]] RegularityResult regularity_test(const LevyModel& model,
                                               const IntegralTestOptions& options = {});

enum class ContactClass {
  kPositiveLebesgue,
  kDiscreteContacts,
  kZeroMeasureNonDiscrete,
  kDegeneratePiecewiseLinear,
  kIndeterminate,
};
[[nodiscard]] const char* to_string(ContactClass c);

struct Classification {
  ContactClass contact_class = ContactClass::kIndeterminate;
  std::string reason;
};
[[nodiscard]] Classification classify_contact_set(const LevyModel& model, double alpha);

// Family of marginals indexed by r: (r, t) -> P{X_t in [0, r t]}.
using RMarginalFamily = std::function<ProbabilityEstimate(double r, double t)>;

struct RStarEstimate {
  double r_star = 0.0;  // bracket midpoint, or +inf when all tested r converge
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool all_converged = false;
  bool all_diverged = false;
  int indeterminate_count = 0;
};

// Bisection for sup{r >= 0 : int_0^1 t^-1 P{X_t in [0, r t]} dt < inf}.
[[nodiscard]] RStarEstimate estimate_r_star(const RMarginalFamily& family, double r_lo,
                                            double r_hi, int bisection_steps,
                                            const IntegralTestOptions& options = {});
[[nodiscard]] RStarEstimate estimate_r_star(const LevyModel& model, double r_lo, double r_hi,
                                            int bisection_steps,
                                            const IntegralTestOptions& options = {});

struct VigonResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  bool converged = true;
};

// Two independent evaluations of
//   int_0^inf t^-1 e^{-q t} P{X_t in [a t, b t]} dt
//     = (1/pi) int_a^b int_0^inf Re 1 / (q + Psi(-u) - i u r) du dr.
// The left side integrates marginal_interval_prob, the right side eval_psi.
// Throws PreconditionError when sigma2 == 0.
[[nodiscard]] VigonResult vigon_identity(const LevyModel& model, double q, double a, double b);

struct PkZeroResult {
  double value = 0.0;
  double integral = 0.0;  // int_0^inf t^-1 P{X_t not in [-alpha t, alpha t]} dt
  double error = 0.0;
  ContactClass contact_class = ContactClass::kIndeterminate;
  std::string note;
};

// P{K = 0} = exp(-int_0^inf t^-1 P{X_t not in [-alpha t, alpha t]} dt); 0 with
// a note outside the positive-Lebesgue class.
[[nodiscard]] PkZeroResult p_k_zero(const LevyModel& model, double alpha);

struct AbruptnessResult {
  bool abrupt = false;
  std::vector<std::pair<double, double>> intervals;
  std::vector<IntegralVerdict> verdicts;
};

// Abrupt: unbounded variation and int_0^1 t^-1 P{X_t in [a t, b t]} dt < inf
// for every tested a < b.
[[nodiscard]] AbruptnessResult abruptness_check(const LevyModel& model,
                                                const IntegralTestOptions& options = {});

}  // namespace lipminor
