#include "lipminor/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "lipminor/error.hpp"
#include "lipminor/numeric.hpp"

namespace lipminor {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

double jump_mean(const JumpLaw& law) {
  return std::visit(overloaded{
                        [](const TwoPointJumps& j) { return j.p_up * j.up + (1.0 - j.p_up) * j.down; },
                        [](const GaussianJumps& j) { return j.mean; },
                        [](const SymmetricExponentialJumps&) { return 0.0; },
                    },
                    law);
}

// Poisson(mu) weights up to the point where the remaining mass is negligible.
template <class F>
void for_each_poisson_term(double mu, F&& term) {
  const double cap = mu + 40.0 * std::sqrt(mu) + 60.0;
  // Terms below mu - 40 sqrt(mu) carry less than 1e-300 of the mass.
  const int first = static_cast<int>(std::max(0.0, std::floor(mu - 40.0 * std::sqrt(mu))));
  for (int k = first; k <= static_cast<int>(cap); ++k) {
    const double w = std::exp(-mu + (k > 0 ? k * std::log(mu) : 0.0) - std::lgamma(k + 1.0));
    term(k, w);
    if (k > mu && w < 1e-20) break;
  }
}

double binomial_pmf(int k, int j, double p) {
  if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return j == k ? 1.0 : 0.0;
  return std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                  j * std::log(p) + (k - j) * std::log1p(-p));
}

// P{c + scale (G1 - G2) in [lo, hi]} with G1, G2 iid Gamma(k, 1), k >= 1.
ProbabilityEstimate laplace_sum_interval(int k, double scale, double c, double lo, double hi) {
  const double u = (hi - c) / scale;
  const double l = (lo - c) / scale;
  auto integrand = [&](double y) {
    const double dens = std::exp((k - 1) * std::log(y) - y - std::lgamma(static_cast<double>(k)));
    const double upper = std::isinf(u) ? (u > 0 ? 1.0 : 0.0) : numeric::gamma_p(k, u + y);
    const double lower = std::isinf(l) ? (l > 0 ? 1.0 : 0.0) : numeric::gamma_p(k, l + y);
    return dens * (upper - lower);
  };
  std::vector<double> cuts = {0.0};
  for (double c : {-u, -l}) {
    if (c > 0.0 && std::isfinite(c)) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double value = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      const auto r = numeric::integrate(integrand, cuts[i], cuts[i + 1]);
      value += r.value;
      err += r.error;
    }
  }
  const auto r = numeric::integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity());
  value += r.value;
  err += r.error;
  return {std::clamp(value, 0.0, 1.0), err, err < 1e-9, "quadrature"};
}

}  // namespace

void LevyModel::validate() const {
  if (!finite(sigma2) || sigma2 < 0.0) throw ParameterError("model: sigma2 must be >= 0");
  if (!finite(drift)) throw ParameterError("model: drift must be finite");
  std::visit(overloaded{
                 [](const NoJumps&) {},
                 [](const CompoundPoisson& cp) {
                   if (!finite(cp.rate) || !(cp.rate > 0.0)) {
                     throw ParameterError("model: compound Poisson rate must be > 0");
                   }
                   std::visit(overloaded{
                                  [](const TwoPointJumps& j) {
                                    if (!finite(j.up) || !finite(j.down) || !(j.p_up >= 0.0) ||
                                        !(j.p_up <= 1.0)) {
                                      throw ParameterError("model: invalid two-point jump law");
                                    }
                                  },
                                  [](const GaussianJumps& j) {
                                    if (!finite(j.mean) || !finite(j.sd) || j.sd < 0.0) {
                                      throw ParameterError("model: invalid Gaussian jump law");
                                    }
                                  },
                                  [](const SymmetricExponentialJumps& j) {
                                    if (!finite(j.scale) || !(j.scale > 0.0)) {
                                      throw ParameterError("model: Laplace jump scale must be > 0");
                                    }
                                  },
                              },
                              cp.law);
                 },
                 [](const SymmetricStable& s) {
                   if (!(s.index > 1.0 && s.index < 2.0)) {
                     throw ParameterError("model: stable index must lie in (1, 2)");
                   }
                   if (!finite(s.scale) || !(s.scale > 0.0)) {
                     throw ParameterError("model: stable scale must be > 0");
                   }
                 },
             },
             jumps);
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  os << "sigma2=" << sigma2 << " drift=" << drift;
  std::visit(overloaded{
                 [&](const NoJumps&) {},
                 [&](const CompoundPoisson& cp) {
                   os << " cp(rate=" << cp.rate;
                   std::visit(overloaded{
                                  [&](const TwoPointJumps& j) {
                                    os << ", two_point " << j.up << "/" << j.down << " p=" << j.p_up;
                                  },
                                  [&](const GaussianJumps& j) {
                                    os << ", gaussian " << j.mean << "," << j.sd;
                                  },
                                  [&](const SymmetricExponentialJumps& j) {
                                    os << ", laplace " << j.scale;
                                  },
                              },
                              cp.law);
                   os << ")";
                 },
                 [&](const SymmetricStable& s) {
                   os << " stable(index=" << s.index << ", scale=" << s.scale << ")";
                 },
             },
             jumps);
  return os.str();
}

double eval_mean(const LevyModel& model) {
  if (const auto* cp = std::get_if<CompoundPoisson>(&model.jumps)) {
    return model.drift + cp->rate * jump_mean(cp->law);
  }
  return model.drift;
}

std::complex<double> jump_characteristic_function(const JumpLaw& law, double theta) {
  using namespace std::complex_literals;
  return std::visit(
      overloaded{
          [&](const TwoPointJumps& j) {
            return j.p_up * std::exp(1i * theta * j.up) +
                   (1.0 - j.p_up) * std::exp(1i * theta * j.down);
          },
          [&](const GaussianJumps& j) {
            return std::exp(1i * theta * j.mean - 0.5 * j.sd * j.sd * theta * theta);
          },
          [&](const SymmetricExponentialJumps& j) {
            return std::complex<double>(1.0 / (1.0 + j.scale * j.scale * theta * theta), 0.0);
          },
      },
      law);
}

std::complex<double> eval_psi(const LevyModel& model, double theta) {
  using namespace std::complex_literals;
  std::complex<double> psi = -1i * model.drift * theta + 0.5 * model.sigma2 * theta * theta;
  if (const auto* cp = std::get_if<CompoundPoisson>(&model.jumps)) {
    psi += cp->rate * (1.0 - jump_characteristic_function(cp->law, theta));
  } else if (const auto* st = std::get_if<SymmetricStable>(&model.jumps)) {
    psi += std::pow(st->scale * std::abs(theta), st->index);
  }
  return psi;
}

ProbabilityEstimate marginal_interval_prob(const LevyModel& model, double t, double a, double b) {
  model.validate();
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("marginal_interval_prob: t must be > 0");
  if (!(a <= b)) throw ParameterError("marginal_interval_prob: requires a <= b");
  if (a == b && std::isinf(a)) return {0.0};
  const double lo = a * t;
  const double hi = b * t;
  const double center = model.drift * t;
  const double gvar = model.sigma2 * t;

  if (!model.has_jumps()) return {numeric::normal_interval(center, gvar, lo, hi)};

  if (const auto* st = std::get_if<SymmetricStable>(&model.jumps)) {
    // Standardise by the stable scale at time t.
    const double s = st->scale * std::pow(t, 1.0 / st->index);
    const double kappa = gvar / (s * s);
    const double index = st->index;
    auto cf = [=](double v) {
      return std::complex<double>(std::exp(-std::pow(std::abs(v), index) - 0.5 * kappa * v * v), 0.0);
    };
    const auto r = numeric::invert_interval_probability(cf, (lo - center) / s, (hi - center) / s);
    return {r.value, r.error, r.converged, "cf_inversion"};
  }

  const auto& cp = std::get<CompoundPoisson>(model.jumps);
  const double mu = cp.rate * t;

  if (const auto* tp = std::get_if<TwoPointJumps>(&cp.law)) {
    double p = 0.0;
    if (gvar == 0.0 && tp->up != tp->down) {
      // With j jumps of the larger size the value is center + k low + j step.
      const double high = std::max(tp->up, tp->down);
      const double low = std::min(tp->up, tp->down);
      const double q = high == tp->up ? tp->p_up : 1.0 - tp->p_up;
      const double step = high - low;
      for_each_poisson_term(mu, [&](int k, double w) {
        const double offset = center + k * low;
        const double jmin = std::max(0.0, std::ceil((lo - offset) / step - 1e-12));
        const double jmax = std::min(static_cast<double>(k), std::floor((hi - offset) / step + 1e-12));
        if (jmax < jmin || w < 1e-300) return;
        if (q <= 0.0 || q >= 1.0 || k == 0) {
          const double only = q >= 1.0 ? k : 0.0;
          if (only >= jmin && only <= jmax) p += w;
          return;
        }
        const boost::math::binomial_distribution<double> bin(k, q);
        const double below = jmin > 0.0 ? boost::math::cdf(bin, jmin - 1.0) : 0.0;
        p += w * std::max(0.0, boost::math::cdf(bin, jmax) - below);
      });
      return {std::clamp(p, 0.0, 1.0)};
    }
    for_each_poisson_term(mu, [&](int k, double w) {
      double inner = 0.0;
      for (int j = 0; j <= k; ++j) {
        const double bw = binomial_pmf(k, j, tp->p_up);
        if (bw < 1e-300) continue;
        inner += bw * numeric::normal_interval(center + j * tp->up + (k - j) * tp->down, gvar, lo, hi);
      }
      p += w * inner;
    });
    return {std::clamp(p, 0.0, 1.0)};
  }
  if (const auto* gj = std::get_if<GaussianJumps>(&cp.law)) {
    double p = 0.0;
    for_each_poisson_term(mu, [&](int k, double w) {
      p += w * numeric::normal_interval(center + k * gj->mean, gvar + k * gj->sd * gj->sd, lo, hi);
    });
    return {std::clamp(p, 0.0, 1.0)};
  }

  const auto& lap = std::get<SymmetricExponentialJumps>(cp.law);
  if (gvar > 0.0) {
    auto cf = [&](double th) { return std::exp(-t * eval_psi(model, th)); };
    const auto r = numeric::invert_interval_probability(cf, lo, hi);
    return {r.value, r.error, r.converged, "cf_inversion"};
  }
  ProbabilityEstimate total{0.0, 0.0, true, "quadrature"};
  for_each_poisson_term(mu, [&](int k, double w) {
    if (k == 0) {
      total.value += w * ((center >= lo && center <= hi) ? 1.0 : 0.0);
      return;
    }
    if (w < 1e-18) return;
    const auto r = laplace_sum_interval(k, lap.scale, center, lo, hi);
    total.value += w * r.value;
    total.abs_error += w * r.abs_error;
    total.converged = total.converged && r.converged;
  });
  total.value = std::clamp(total.value, 0.0, 1.0);
  return total;
}

}  // namespace lipminor
