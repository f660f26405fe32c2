#include "lipminor/brownian_oracle.hpp"

#include <cmath>
#include <numbers>

#include "lipminor/error.hpp"
#include "lipminor/numeric.hpp"

namespace lipminor::oracle {
namespace {

double inv_sqrt_2pi() { return 1.0 / std::sqrt(2.0 * std::numbers::pi); }

void require_zero_drift_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
}

void require_nonnegative_theta(double theta) {
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
}

}  // namespace

void BrownianParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
  if (!std::isfinite(beta) || !(std::abs(beta) < alpha)) {
    throw ParameterError("Brownian oracle requires |beta| < alpha");
  }
}

UnitVarianceScaling to_unit_variance(double alpha, double beta, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  UnitVarianceScaling out{{alpha / sigma, beta / sigma}, sigma};
  out.params.validate();
  return out;
}

std::complex<double> k_laplace(const BrownianParams& p, std::complex<double> theta) {
  p.validate();
  const double a = p.alpha;
  const double b = p.beta;
  const std::complex<double> up = std::sqrt(2.0 * theta + (a + b) * (a + b));
  const std::complex<double> dn = std::sqrt(2.0 * theta + (a - b) * (a - b));
  const std::complex<double> den = up + dn + 2.0 * a;
  return 8.0 * a * (a * a - b * b) * (1.0 / up + 1.0 / dn) / (den * den);
}

double k_laplace(const BrownianParams& p, double theta) {
  require_nonnegative_theta(theta);
  return k_laplace(p, std::complex<double>(theta, 0.0)).real();
}

double lambda_ratio(const BrownianParams& p, double theta) {
  p.validate();
  require_nonnegative_theta(theta);
  const double a = p.alpha;
  const double b = p.beta;
  return 4.0 * (a * a - b * b) * theta /
         ((std::sqrt(2.0 * theta + (a - b) * (a - b)) + a - b) *
          (std::sqrt(2.0 * theta + (a + b) * (a + b)) + a + b));
}

double k_density_zero_drift(double alpha, double kappa) {
  require_zero_drift_alpha(alpha);
  if (!(kappa > 0.0)) throw DomainError("K density requires kappa > 0");
  const double a2 = alpha * alpha;
  return 4.0 * alpha * a2 * inv_sqrt_2pi() * std::sqrt(kappa) * std::exp(-0.5 * a2 * kappa) -
         4.0 * a2 * a2 * kappa * numeric::normal_cdf(-alpha * std::sqrt(kappa));
}

double k_cdf_zero_drift(double alpha, double kappa) {
  require_zero_drift_alpha(alpha);
  if (kappa <= 0.0) return 0.0;
  const double c = alpha * alpha * kappa;
  return 4.0 * numeric::gamma_p(1.5, 0.5 * c) - 2.0 * c * c * numeric::normal_cdf(-std::sqrt(c)) -
         3.0 * numeric::gamma_p(2.5, 0.5 * c);
}

double lambda_density_zero_drift(double alpha, double x) {
  require_zero_drift_alpha(alpha);
  if (!(x > 0.0)) throw DomainError("Lambda density requires x > 0");
  return 2.0 * alpha * inv_sqrt_2pi() * std::exp(-0.5 * alpha * alpha * x) / std::sqrt(x) -
         2.0 * alpha * alpha * numeric::normal_cdf(-alpha * std::sqrt(x));
}

double h_density(double alpha, double h) {
  require_zero_drift_alpha(alpha);
  if (!(h >= 0.0)) throw DomainError("H density requires h >= 0");
  const double rate = 4.0 * alpha;
  return rate * rate * h * std::exp(-rate * h);
}

double h_cdf(double alpha, double h) {
  require_zero_drift_alpha(alpha);
  if (h <= 0.0) return 0.0;
  const double x = 4.0 * alpha * h;
  return -std::expm1(-x) - x * std::exp(-x);
}

std::pair<double, double> h_moments(double alpha) {
  require_zero_drift_alpha(alpha);
  return {1.0 / (2.0 * alpha), 1.0 / (8.0 * alpha * alpha)};
}

double t_laplace(const BrownianParams& p, double theta) {
  p.validate();
  const double a = p.alpha;
  const double b = p.beta;
  if (!(theta >= -0.5 * (a - b) * (a - b) && theta <= 0.5 * (a + b) * (a + b))) {
    throw DomainError("t_laplace: theta outside [-(alpha-beta)^2/2, (alpha+beta)^2/2]");
  }
  // The printed form has a removable 1/theta singularity. Writing
  // x = sqrt((a+b)^2 - 2 theta), y = sqrt((a-b)^2 + 2 theta) and clearing the
  // difference of reciprocals gives a cancellation-free expression.
  const double x = std::sqrt((a + b) * (a + b) - 2.0 * theta);
  const double y = std::sqrt((a - b) * (a - b) + 2.0 * theta);
  const double num = 4.0 + 4.0 * b * (1.0 / (y + a - b) - 1.0 / (x + a + b));
  return 8.0 * a * (a * a - b * b) * num / ((x + y) * (x + 3.0 * a - b) * (y + 3.0 * a + b));
}

double p_t_positive(const BrownianParams& p) {
  p.validate();
  return 0.5 * (1.0 + p.beta / p.alpha);
}

double s_laplace(const BrownianParams& p, double theta) {
  p.validate();
  require_nonnegative_theta(theta);
  const double c = p.alpha - p.beta;
  return 2.0 * c / (std::sqrt(2.0 * theta + c * c) + c);
}

double ttilde_laplace(const BrownianParams& p, double theta) {
  p.validate();
  require_nonnegative_theta(theta);
  const double c = p.alpha + p.beta;
  return 2.0 * c / (std::sqrt(2.0 * theta + c * c) + c);
}

std::pair<double, double> neg_inf_exp_rates(const BrownianParams& p) {
  p.validate();
  return {2.0 * (p.alpha - p.beta), 2.0 * (p.alpha + p.beta)};
}

double f_minus_laplace(const BrownianParams& p, double theta, double h) {
  p.validate();
  require_nonnegative_theta(theta);
  if (!(h <= 0.0)) throw DomainError("f_minus_laplace requires h <= 0");
  const double c = p.alpha - p.beta;
  return 2.0 * c * std::exp(h * (std::sqrt(2.0 * theta + c * c) + c));
}

double f_plus_laplace(const BrownianParams& p, double theta, double h) {
  p.validate();
  require_nonnegative_theta(theta);
  if (!(h <= 0.0)) throw DomainError("f_plus_laplace requires h <= 0");
  const double c = p.alpha + p.beta;
  return 2.0 * c * std::exp(h * (std::sqrt(2.0 * theta + c * c) + c));
}

double f_density_zero_drift(double xi, double h, double alpha) {
  require_zero_drift_alpha(alpha);
  if (!(xi > 0.0) || !(h < 0.0)) throw DomainError("f density requires xi > 0 and h < 0");
  const double z = alpha * xi - h;
  return -2.0 * alpha * h * inv_sqrt_2pi() / (xi * std::sqrt(xi)) * std::exp(-z * z / (2.0 * xi));
}

}  // namespace lipminor::oracle
