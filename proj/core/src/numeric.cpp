#include "lipminor/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace lipminor::numeric {

QuadratureResult integrate(const RealFunction& f, double a, double b, double rel_tol,
                           unsigned max_depth) {
  if (a == b) return {};
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol, &error);
  return {value, error};
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * boost::math::erfc(x / std::numbers::sqrt2); }

double normal_interval(double mean, double var, double lo, double hi) {
  if (hi < lo) return 0.0;
  if (var <= 0.0) return (mean >= lo && mean <= hi) ? 1.0 : 0.0;
  const double s = std::sqrt(var);
  const double z1 = (lo - mean) / s;
  const double z2 = (hi - mean) / s;
  if (z1 > 0.0) return std::max(0.0, normal_sf(z1) - normal_sf(z2));
  return std::max(0.0, normal_cdf(z2) - normal_cdf(z1));
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

namespace {

double find_theta_max(const std::function<std::complex<double>(double)>& cf) {
  double theta_max = 1.0;
  while (std::abs(cf(theta_max)) > 1e-17 && theta_max < 1e8) theta_max *= 2.0;
  return theta_max;
}

// Integral of g over [0, theta_max] in panels short enough to resolve
// oscillations of frequency `freq`.
template <class G>
QuadratureResult panel_integral(const G& g, double theta_max, double freq) {
  double panel = std::min(theta_max / 8.0, std::numbers::pi / std::max(freq, 1e-300));
  const double max_panels = 2e5;
  if (theta_max / panel > max_panels) panel = theta_max / max_panels;
  QuadratureResult out;
  for (double a = 0.0; a < theta_max; a += panel) {
    const double b = std::min(a + panel, theta_max);
    double e = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, a, b, 6, 1e-12, &e);
    out.error += e;
  }
  return out;
}

}  // namespace

InversionResult invert_interval_probability(
    const std::function<std::complex<double>(double)>& cf, double lo, double hi) {
  InversionResult out;
  if (hi < lo) return out;
  if (std::isinf(lo) || std::isinf(hi)) {
    const InversionResult fh = std::isinf(hi) ? InversionResult{1.0, 0.0, 0.0, true} : invert_cdf(cf, hi);
    const InversionResult fl = std::isinf(lo) ? InversionResult{0.0, 0.0, 0.0, true} : invert_cdf(cf, lo);
    out.value = std::clamp(fh.value - fl.value, 0.0, 1.0);
    out.error = fh.error + fl.error;
    out.theta_max = std::max(fh.theta_max, fl.theta_max);
    out.converged = fh.converged && fl.converged;
    return out;
  }
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  out.theta_max = find_theta_max(cf);
  if (out.theta_max >= 1e8) return out;

  // (e^{-i th lo} - e^{-i th hi}) / (i th) = e^{-i th mid} 2 sin(th half) / th.
  auto integrand = [&](double th) {
    const std::complex<double> rot(std::cos(th * mid), -std::sin(th * mid));
    return (cf(th) * rot).real() * 2.0 * std::sin(th * half) / th;
  };
  const auto r = panel_integral(integrand, out.theta_max, std::max(std::abs(lo), std::abs(hi)));
  out.value = std::clamp(r.value / std::numbers::pi, 0.0, 1.0);
  out.error = r.error / std::numbers::pi;
  out.converged = out.error < 1e-8;
  return out;
}

InversionResult invert_cdf(const std::function<std::complex<double>(double)>& cf, double x) {
  InversionResult out;
  out.theta_max = find_theta_max(cf);
  if (out.theta_max >= 1e8) return out;
  // F(x) = 1/2 - (1/pi) int_0^inf Im[e^{-i th x} cf(th)] / th d th.
  auto integrand = [&](double th) {
    const std::complex<double> rot(std::cos(th * x), -std::sin(th * x));
    return (cf(th) * rot).imag() / th;
  };
  const auto r = panel_integral(integrand, out.theta_max, std::abs(x));
  out.value = std::clamp(0.5 - r.value / std::numbers::pi, 0.0, 1.0);
  out.error = r.error / std::numbers::pi;
  out.converged = out.error < 1e-8;
  return out;
}

double talbot_inverse(const std::function<std::complex<double>(std::complex<double>)>& transform,
                      double t, int terms) {
  const double m = terms;
  const double r = 2.0 * m / (5.0 * t);
  double sum = 0.5 * std::exp(r * t) * transform(std::complex<double>(r, 0.0)).real();
  for (int k = 1; k < terms; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const std::complex<double> s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * s) * transform(s) * std::complex<double>(1.0, sigma)).real();
  }
  return r / m * sum;
}

}  // namespace lipminor::numeric
