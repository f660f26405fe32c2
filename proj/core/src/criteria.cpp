#include "lipminor/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <variant>
#include <vector>

#include "lipminor/error.hpp"
#include "lipminor/numeric.hpp"

namespace lipminor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int over [2^-(k+1), 2^-k] of t^-1 P(t) dt, as int P(e^s) ds.
struct Level {
  double value = 0.0;
  double error = 0.0;
};

Level integrate_level(const MarginalFunction& marginal, int k) {
  double marginal_error = 0.0;
  auto f = [&](double s) {
    const ProbabilityEstimate p = marginal(std::exp(s));
    marginal_error = std::max(marginal_error, p.abs_error);
    return p.value;
  };
  const double hi = -static_cast<double>(k) * std::numbers::ln2;
  const auto r = numeric::integrate(f, hi - std::numbers::ln2, hi, 1e-10, 12);
  return {r.value, r.error + std::numbers::ln2 * marginal_error};
}

// One Gauss-Kronrod panel, refined adaptively only when its error estimate
// exceeds an absolute tolerance.
numeric::QuadratureResult integrate_abs(const numeric::RealFunction& f, double a, double b,
                                        double abs_tol) {
  const auto coarse = numeric::integrate(f, a, b, 1e-10, 0);
  if (coarse.error <= abs_tol) return coarse;
  return numeric::integrate(f, a, b, 1e-10, 8);
}

// Times in (lo, hi) where t -> P{X_t in [-alpha t, alpha t]} jumps. Only
// two-point jumps without a Gaussian part have such steps: with m up and n
// down jumps the value x = m up + n down + d t leaves the cone at
// t = x / (alpha - d) or t = -x / (alpha + d). Counts whose Poisson weight is
// negligible are skipped.
std::vector<double> step_times(const LevyModel& model, double alpha, double lo, double hi) {
  std::vector<double> out;
  const auto* cp = std::get_if<CompoundPoisson>(&model.jumps);
  if (cp == nullptr || model.sigma2 != 0.0) return out;
  const auto* tp = std::get_if<TwoPointJumps>(&cp->law);
  if (tp == nullptr) return out;
  const double mu = cp->rate * hi;
  const auto max_count = static_cast<long>(std::ceil(mu + 10.0 * std::sqrt(mu) + 20.0));
  const double d = model.drift;
  for (const double scale : {alpha - d, -(alpha + d)}) {
    // Breakpoint t = x / scale lies in (lo, hi) iff x lies between x_lo and x_hi.
    const double x_lo = std::min(scale * lo, scale * hi);
    const double x_hi = std::max(scale * lo, scale * hi);
    for (long m = 0; m <= max_count; ++m) {
      const double base = static_cast<double>(m) * tp->up;
      long n_min = 0;
      long n_max = max_count - m;
      if (tp->down != 0.0) {
        double a = (x_lo - base) / tp->down;
        double b = (x_hi - base) / tp->down;
        if (a > b) std::swap(a, b);
        n_min = std::max(n_min, static_cast<long>(std::ceil(a)));
        n_max = std::min(n_max, static_cast<long>(std::floor(b)));
      } else if (base < x_lo || base > x_hi) {
        continue;
      }
      for (long n = n_min; n <= n_max; ++n) {
        const double t = (base + static_cast<double>(n) * tp->down) / scale;
        if (t > lo && t < hi) out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// integrate_abs on [a, b] split at the given interior points.
numeric::QuadratureResult integrate_split(const numeric::RealFunction& f, double a, double b,
                                          const std::vector<double>& cuts, double abs_tol) {
  numeric::QuadratureResult total;
  double left = a;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const double right = i < cuts.size() ? cuts[i] : b;
    if (right > left) {
      const auto r = integrate_abs(f, left, right, abs_tol);
      total.value += r.value;
      total.error += r.error;
    }
    left = right;
  }
  return total;
}

struct Diagnosis {
  Verdict verdict = Verdict::kIndeterminate;
  double gamma = 0.0;
  double rho = 0.0;
};

Diagnosis diagnose(const std::vector<double>& c, const IntegralTestOptions& opt) {
  Diagnosis d;
  const std::size_t w = static_cast<std::size_t>(opt.window);
  if (c.size() < w + 1) return d;
  const std::size_t start = c.size() - (w + 1);
  bool all_zero = true;
  for (std::size_t i = start; i < c.size(); ++i) all_zero = all_zero && c[i] <= 0.0;
  if (all_zero) {
    d.verdict = Verdict::kConverged;
    d.gamma = kInf;
    return d;
  }
  bool all_high = true;
  bool all_low = true;
  for (std::size_t i = start; i + 1 < c.size(); ++i) {
    const double ratio = c[i] > 0.0 ? c[i + 1] / c[i] : (c[i + 1] > 0.0 ? kInf : 0.0);
    all_high = all_high && ratio >= opt.ratio_threshold;
    all_low = all_low && ratio < opt.ratio_threshold;
  }
  // Least-squares slope of log2 c_k against k.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = start; i < c.size(); ++i) {
    if (c[i] <= 0.0) continue;
    const double x = static_cast<double>(i);
    const double y = std::log2(c[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    d.gamma = -slope;
  } else {
    d.gamma = kInf;
  }
  if (all_high) {
    d.verdict = Verdict::kDiverged;
  } else if (all_low && d.gamma > 0.0) {
    d.verdict = Verdict::kConverged;
    d.rho = std::isfinite(d.gamma) ? std::exp2(-d.gamma) : 0.0;
  }
  return d;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kConverged:
      return "converged";
    case Verdict::kDiverged:
      return "diverged";
    case Verdict::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

const char* to_string(ContactClass c) {
  switch (c) {
    case ContactClass::kPositiveLebesgue:
      return "PositiveLebesgue";
    case ContactClass::kDiscreteContacts:
      return "DiscreteContacts";
    case ContactClass::kZeroMeasureNonDiscrete:
      return "ZeroMeasureNonDiscrete";
    case ContactClass::kDegeneratePiecewiseLinear:
      return "DegeneratePiecewiseLinear";
    case ContactClass::kIndeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

ExistenceResult existence_check(const LevyModel& model, double alpha) {
  model.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
  const double mean = eval_mean(model);
  ExistenceResult out;
  std::ostringstream os;
  if (model.is_pure_drift() && std::abs(model.drift) == alpha) {
    out.exists = true;
    out.degenerate = true;
    os << "pure drift with |d| = alpha: the path is its own minorant";
  } else if (std::abs(mean) < alpha) {
    out.exists = true;
    os << "|E X_1| = " << std::abs(mean) << " < alpha = " << alpha;
  } else {
    os << "|E X_1| = " << std::abs(mean) << " >= alpha = " << alpha;
  }
  out.reason = os.str();
  return out;
}

IntegralVerdict integral_test(const MarginalFunction& marginal, const IntegralTestOptions& options) {
  if (!(options.t_min > 0.0) || !(options.t_min < 1.0)) {
    throw ParameterError("integral_test: t_min must lie in (0, 1)");
  }
  if (options.window < 2) throw ParameterError("integral_test: window must be >= 2");
  const int base_levels =
      std::max(options.window + 1, static_cast<int>(std::lround(-std::log2(options.t_min))));
  IntegralVerdict out;
  double truncated = 0.0;
  double error = 0.0;
  Diagnosis diag;
  int k = 0;
  for (; k < std::max(base_levels, options.max_levels); ++k) {
    const Level level = integrate_level(marginal, k);
    out.level_contributions.push_back(level.value);
    truncated += level.value;
    error += level.error;
    if (k + 1 < base_levels) continue;
    diag = diagnose(out.level_contributions, options);
    if (diag.verdict != Verdict::kIndeterminate) break;
  }
  const int levels = static_cast<int>(out.level_contributions.size());
  out.t_min = std::exp2(-static_cast<double>(levels));
  out.truncated_estimate = truncated;
  out.standard_error = error;
  out.divergence_exponent = diag.gamma;
  out.verdict = diag.verdict;
  out.diverged = diag.verdict == Verdict::kDiverged;
  if (diag.verdict == Verdict::kConverged && diag.rho > 0.0) {
    out.tail_estimate = out.level_contributions.back() * diag.rho / (1.0 - diag.rho);
  }
  out.estimate = truncated + out.tail_estimate;
  std::ostringstream os;
  os << levels << " dyadic levels, fitted exponent " << diag.gamma;
  if (diag.verdict == Verdict::kIndeterminate) os << "; level ratios inconclusive";
  out.diagnostics = os.str();
  return out;
}

IntegralVerdict integral_test(const LevyModel& model, double a, double b,
                              const IntegralTestOptions& options) {
  model.validate();
  if (!(a <= b)) throw ParameterError("integral_test: requires a <= b");
  return integral_test(
      [&](double t) { return marginal_interval_prob(model, t, a, b); }, options);
}

RegularityResult regularity_test(const LevyModel& model, const IntegralTestOptions& options) {
  RegularityResult out;
  out.verdict = integral_test(model, -kInf, 0.0, options);
  out.regular = out.verdict.diverged;
  return out;
}

Classification classify_contact_set(const LevyModel& model, double alpha) {
  const ExistenceResult ex = existence_check(model, alpha);
  Classification out;
  if (!ex.exists) {
    out.reason = "minorant does not exist: " + ex.reason;
    return out;
  }
  if (ex.degenerate) {
    out.contact_class = ContactClass::kDegeneratePiecewiseLinear;
    out.reason = ex.reason;
    return out;
  }
  if (model.is_pure_drift()) {
    out.contact_class = ContactClass::kPositiveLebesgue;
    out.reason = "pure drift with |d| < alpha: every time is a contact";
    return out;
  }
  if (!model.bounded_variation()) {
    const IntegralVerdict v = integral_test(model, -alpha, alpha);
    switch (v.verdict) {
      case Verdict::kConverged:
        out.contact_class = ContactClass::kDiscreteContacts;
        out.reason = "unbounded variation: zero measure; finite level integral over [-alpha, alpha]";
        break;
      case Verdict::kDiverged:
        out.contact_class = ContactClass::kZeroMeasureNonDiscrete;
        out.reason = "unbounded variation: zero measure; level integral over [-alpha, alpha] diverges";
        break;
      case Verdict::kIndeterminate:
        out.reason = "unbounded variation: zero measure; discreteness undecided (" + v.diagnostics + ")";
        break;
    }
    return out;
  }
  // Bounded variation with finitely many jumps.
  const double d = std::abs(model.drift);
  if (d < alpha) {
    out.contact_class = ContactClass::kPositiveLebesgue;
    out.reason = "bounded variation, |d| < alpha: zero is irregular for both half-line tests";
  } else if (d == alpha) {
    out.contact_class = ContactClass::kPositiveLebesgue;
    out.reason = "sigma = 0, finite Levy measure, |d| = alpha: piecewise linear with slope d";
  } else {
    out.contact_class = ContactClass::kDiscreteContacts;
    out.reason = "bounded variation, |d| > alpha: zero measure; finite Levy measure";
  }
  return out;
}

RStarEstimate estimate_r_star(const RMarginalFamily& family, double r_lo, double r_hi,
                              int bisection_steps, const IntegralTestOptions& options) {
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw ParameterError("estimate_r_star: need 0 <= r_lo < r_hi");
  RStarEstimate out;
  auto verdict_at = [&](double r) {
    const IntegralVerdict v =
        integral_test([&](double t) { return family(r, t); }, options);
    if (v.verdict == Verdict::kIndeterminate) ++out.indeterminate_count;
    return v.verdict;
  };
  if (verdict_at(r_hi) == Verdict::kConverged) {
    out.all_converged = true;
    out.r_star = kInf;
    out.bracket_lo = r_hi;
    out.bracket_hi = kInf;
    return out;
  }
  if (verdict_at(r_lo) != Verdict::kConverged) {
    out.all_diverged = true;
    out.r_star = r_lo;
    out.bracket_lo = r_lo;
    out.bracket_hi = r_lo;
    return out;
  }
  double lo = r_lo;
  double hi = r_hi;
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    // An inconclusive diagnosis counts as "not converged".
    if (verdict_at(mid) == Verdict::kConverged) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.r_star = 0.5 * (lo + hi);
  return out;
}

RStarEstimate estimate_r_star(const LevyModel& model, double r_lo, double r_hi,
                              int bisection_steps, const IntegralTestOptions& options) {
  model.validate();
  return estimate_r_star(
      [&](double r, double t) { return marginal_interval_prob(model, t, 0.0, r); }, r_lo, r_hi,
      bisection_steps, options);
}

VigonResult vigon_identity(const LevyModel& model, double q, double a, double b) {
  model.validate();
  if (!(q > 0.0)) throw ParameterError("vigon_identity: q must be > 0");
  if (!(model.sigma2 > 0.0)) {
    throw PreconditionError("vigon_identity: only cross-checked for models with sigma2 > 0");
  }
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("vigon_identity: requires finite a <= b");
  }
  VigonResult out;
  if (a == b) return out;

  // Left side: substitute t = e^s and integrate unit s-panels.
  double marginal_error = 0.0;
  auto lhs_integrand = [&](double s) {
    const double t = std::exp(s);
    const ProbabilityEstimate p = marginal_interval_prob(model, t, a, b);
    marginal_error = std::max(marginal_error, p.abs_error);
    if (!p.converged) out.converged = false;
    return std::exp(-q * t) * p.value;
  };
  const double s_hi = std::log(60.0 / q);
  for (double s = -120.0; s < s_hi; s += 1.0) {
    const auto r = numeric::integrate(lhs_integrand, s, std::min(s + 1.0, s_hi), 1e-11, 12);
    out.lhs += r.value;
    out.lhs_error += r.error;
  }
  out.lhs_error += marginal_error * (s_hi + 120.0);

  // Right side: truncate the inner integral where |Psi(-u)| reaches 1e6 and
  // add a power-law tail fitted from the last octave.
  double u_max = 1.0;
  while (std::abs(eval_psi(model, -u_max)) < 1e6 && u_max < 1e12) u_max *= 2.0;
  double tail_error = 0.0;
  auto inner = [&](double r) {
    auto f = [&](double u) {
      const std::complex<double> den = q + eval_psi(model, -u) - std::complex<double>(0.0, u * r);
      return (1.0 / den).real();
    };
    double sum = numeric::integrate(f, 0.0, 1.0, 1e-11, 12).value;
    for (double lo = 1.0; lo < u_max; lo *= 2.0) {
      sum += numeric::integrate(f, lo, 2.0 * lo, 1e-11, 12).value;
    }
    const double f_hi = f(u_max);
    const double f_mid = f(0.5 * u_max);
    if (f_hi > 0.0 && f_mid > 0.0) {
      const double p = std::log2(f_mid / f_hi);
      if (p > 1.05) {
        const double tail = u_max * f_hi / (p - 1.0);
        sum += tail;
        tail_error = std::max(tail_error, 1e-3 * std::abs(tail));
      } else {
        out.converged = false;
      }
    }
    return sum;
  };
  const auto r = numeric::integrate(inner, a, b, 1e-10, 10);
  out.rhs = r.value / std::numbers::pi;
  out.rhs_error = (r.error + (b - a) * tail_error) / std::numbers::pi;
  out.abs_diff = std::abs(out.lhs - out.rhs);
  return out;
}

PkZeroResult p_k_zero(const LevyModel& model, double alpha) {
  PkZeroResult out;
  const Classification cls = classify_contact_set(model, alpha);
  out.contact_class = cls.contact_class;
  if (cls.contact_class != ContactClass::kPositiveLebesgue) {
    out.note = std::string("P{K = 0} = 0 outside the positive-measure class (") +
               to_string(cls.contact_class) + ")";
    return out;
  }
  if (model.is_pure_drift()) {
    out.value = 1.0;
    out.note = "pure drift: the integrand vanishes";
    return out;
  }
  double marginal_error = 0.0;
  auto outside = [&](double t) {
    const ProbabilityEstimate p = marginal_interval_prob(model, t, -alpha, alpha);
    marginal_error = std::max(marginal_error, p.abs_error);
    return 1.0 - p.value;
  };
  // 1 - P carries an absolute rounding floor near 1e-16, so panels use an
  // absolute tolerance.
  // (0, 1]: dyadic levels in s = log t; the integrand vanishes linearly at 0.
  double integral = 0.0;
  double error = 0.0;
  double last = 0.0;
  for (int k = 0; k < 60 && (k < 8 || last > 1e-15); ++k) {
    const double hi = -k * std::numbers::ln2;
    std::vector<double> cuts = step_times(model, alpha, std::exp(hi - std::numbers::ln2), std::exp(hi));
    for (double& c : cuts) c = std::log(c);
    const auto r = integrate_split([&](double s) { return outside(std::exp(s)); },
                                   hi - std::numbers::ln2, hi, cuts, 1e-13);
    integral += r.value;
    error += r.error;
    last = r.value;
  }
  integral += last;  // geometric tail, ratio 1/2
  // [1, inf): unit panels until the contributions die out.
  int quiet = 0;
  double t = 1.0;
  const double t_cap = 1e4;
  for (; t < t_cap && quiet < 8; t += 1.0) {
    const auto r = integrate_split([&](double x) { return outside(x) / x; }, t, t + 1.0,
                                   step_times(model, alpha, t, t + 1.0), 1e-13);
    integral += r.value;
    error += r.error;
    quiet = r.value < 1e-15 ? quiet + 1 : 0;
  }
  if (quiet < 8) {
    throw NumericalError("p_k_zero: integrand does not decay; classification mismatch");
  }
  out.integral = integral;
  out.error = error + marginal_error * (60.0 * std::numbers::ln2 + std::log(t));
  out.value = std::exp(-integral);
  out.note = cls.reason;
  return out;
}

AbruptnessResult abruptness_check(const LevyModel& model, const IntegralTestOptions& options) {
  model.validate();
  AbruptnessResult out;
  out.intervals = {{-1.0, 1.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.5, 2.0}, {-2.0, -0.5}, {-0.25, 0.25}};
  bool all = !model.bounded_variation();
  for (const auto& [a, b] : out.intervals) {
    out.verdicts.push_back(integral_test(model, a, b, options));
    all = all && out.verdicts.back().verdict == Verdict::kConverged;
  }
  out.abrupt = all;
  return out;
}

}  // namespace lipminor
