#pragma once

#include <complex>
#include <utility>

// Closed forms for X_t = beta t + B_t (unit variance) and slope alpha > |beta|.
namespace lipminor::oracle {

struct BrownianParams {
  double alpha = 1.0;
  double beta = 0.0;

  // Throws ParameterError unless alpha > 0 and |beta| < alpha.
  void validate() const;
};

// X_t = beta t + sigma B_t has the same minorant geometry as Y = X / sigma,
// a unit-variance Brownian motion with drift beta / sigma, against slope
// alpha / sigma. Times (G, D, T, K, S) are unchanged; heights such as H scale
// by sigma.
struct UnitVarianceScaling {
  BrownianParams params;
  double value_scale = 1.0;  // multiply unit-variance heights by this
};
[[nodiscard]] UnitVarianceScaling to_unit_variance(double alpha, double beta, double sigma);

// E[exp(-theta K)].
[[nodiscard]] double k_laplace(const BrownianParams& p, double theta);
// Analytic continuation, for contour inversion.
[[nodiscard]] std::complex<double> k_laplace(const BrownianParams& p, std::complex<double> theta);

// int (1 - e^{-theta x}) Lambda(dx) / int x Lambda(dx).
[[nodiscard]] double lambda_ratio(const BrownianParams& p, double theta);

// Density and distribution function of K when beta = 0.
[[nodiscard]] double k_density_zero_drift(double alpha, double kappa);
[[nodiscard]] double k_cdf_zero_drift(double alpha, double kappa);

// Lambda(dx) / Lambda(R+) when beta = 0.
[[nodiscard]] double lambda_density_zero_drift(double alpha, double x);

// H ~ Gamma(2, rate 4 alpha).
[[nodiscard]] double h_density(double alpha, double h);
[[nodiscard]] double h_cdf(double alpha, double h);
// (mean, variance).
[[nodiscard]] std::pair<double, double> h_moments(double alpha);

// E[exp(theta T)] for theta in [-(alpha - beta)^2 / 2, (alpha + beta)^2 / 2].
[[nodiscard]] double t_laplace(const BrownianParams& p, double theta);
[[nodiscard]] double p_t_positive(const BrownianParams& p);

// E[exp(-theta S)] and E[exp(-theta T~)].
[[nodiscard]] double s_laplace(const BrownianParams& p, double theta);
[[nodiscard]] double ttilde_laplace(const BrownianParams& p, double theta);

// Rates of the exponential laws of -inf_{t<=0}(X_t - alpha t) and
// -inf_{t>=0}(X_t + alpha t): (2 (alpha - beta), 2 (alpha + beta)).
[[nodiscard]] std::pair<double, double> neg_inf_exp_rates(const BrownianParams& p);

// int_0^inf f^-(xi, h) e^{-theta xi} d xi for h <= 0, where f^- is the joint
// density of the time and value of the infimum of X_t - alpha t over t <= 0
// (in reversed time). f_plus_laplace is the same for X_t + alpha t, t >= 0.
[[nodiscard]] double f_minus_laplace(const BrownianParams& p, double theta, double h);
[[nodiscard]] double f_plus_laplace(const BrownianParams& p, double theta, double h);

// f(xi, h) for beta = 0, xi > 0, h < 0.
[[nodiscard]] double f_density_zero_drift(double xi, double h, double alpha);

}  // namespace lipminor::oracle
