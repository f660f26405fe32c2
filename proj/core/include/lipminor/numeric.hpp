#pragma once

#include <complex>
#include <functional>

namespace lipminor::numeric {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

using RealFunction = std::function<double(double)>;

// Adaptive 31-point Gauss-Kronrod on [a, b]; either bound may be infinite.
[[nodiscard]] QuadratureResult integrate(const RealFunction& f, double a, double b,
                                         double rel_tol = 1e-12, unsigned max_depth = 18);

[[nodiscard]] double normal_pdf(double x);
[[nodiscard]] double normal_cdf(double x);
// 1 - normal_cdf(x) without cancellation for large x.
[[nodiscard]] double normal_sf(double x);
// P{lo <= N(mean, var) <= hi}; a point mass when var == 0.
[[nodiscard]] double normal_interval(double mean, double var, double lo, double hi);

// Regularised lower incomplete gamma P(a, x).
[[nodiscard]] double gamma_p(double a, double x);

// P{lo <= Y <= hi} for an absolutely continuous law with characteristic
// function `cf`, by Gil-Pelaez inversion over [0, theta_max] with
// |cf(theta_max)| below 1e-17.
struct InversionResult {
  double value = 0.0;
  double error = 0.0;
  double theta_max = 0.0;
  bool converged = false;
};
[[nodiscard]] InversionResult invert_interval_probability(
    const std::function<std::complex<double>(double)>& cf, double lo, double hi);

// P{Y <= x} by Gil-Pelaez inversion; same truncation rule as above.
[[nodiscard]] InversionResult invert_cdf(const std::function<std::complex<double>(double)>& cf,
                                         double x);

// Fixed Talbot contour inversion of a Laplace transform F at t > 0
// (Abate-Valko). `terms` = 32 gives roughly 10 significant digits for smooth
// transforms.
[[nodiscard]] double talbot_inverse(
    const std::function<std::complex<double>(std::complex<double>)>& transform, double t,
    int terms = 32);

}  // namespace lipminor::numeric
