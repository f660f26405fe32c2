#pragma once

#include <complex>
#include <string>
#include <variant>

namespace lipminor {

struct NoJumps {};

// Jump equal to `up` with probability p_up, `down` otherwise.
struct TwoPointJumps {
  double up = 1.0;
  double down = -1.0;
  double p_up = 0.5;
};

struct GaussianJumps {
  double mean = 0.0;
  double sd = 1.0;
};

// Laplace law with density exp(-|x|/scale) / (2 scale).
struct SymmetricExponentialJumps {
  double scale = 1.0;
};

using JumpLaw = std::variant<TwoPointJumps, GaussianJumps, SymmetricExponentialJumps>;

struct CompoundPoisson {
  double rate = 1.0;
  JumpLaw law = TwoPointJumps{};
};

// Symmetric stable part with characteristic exponent scale^index |theta|^index.
struct SymmetricStable {
  double index = 1.5;
  double scale = 1.0;
};

using JumpSpec = std::variant<NoJumps, CompoundPoisson, SymmetricStable>;

// X_t = drift t + sqrt(sigma2) B_t + J_t.
//
// `drift` is the coefficient of the linear part of the path. For compound
// Poisson jumps (no compensation) it is the bounded-variation drift d when
// sigma2 = 0; for Brownian motion and symmetric stable jumps it coincides with
// the Lévy-Khintchine parameter a, since the symmetric small-jump compensator
// vanishes.
struct LevyModel {
  double sigma2 = 0.0;
  double drift = 0.0;
  JumpSpec jumps = NoJumps{};

  static LevyModel brownian(double drift, double sigma2 = 1.0) {
    return LevyModel{sigma2, drift, NoJumps{}};
  }

  // Throws ParameterError describing the first violated invariant.
  void validate() const;

  [[nodiscard]] bool has_jumps() const { return !std::holds_alternative<NoJumps>(jumps); }
  [[nodiscard]] bool is_compound_poisson() const {
    return std::holds_alternative<CompoundPoisson>(jumps);
  }
  [[nodiscard]] bool is_stable() const { return std::holds_alternative<SymmetricStable>(jumps); }
  // Pi(R) < infinity.
  [[nodiscard]] bool finite_activity() const { return !is_stable(); }
  [[nodiscard]] bool bounded_variation() const { return sigma2 == 0.0 && !is_stable(); }
  // sigma = 0 and Pi = 0: the path is the line drift * t.
  [[nodiscard]] bool is_pure_drift() const { return sigma2 == 0.0 && !has_jumps(); }

  [[nodiscard]] std::string describe() const;
};

// E[X_1].
[[nodiscard]] double eval_mean(const LevyModel& model);

// Characteristic exponent: E[exp(i theta X_t)] = exp(-t Psi(theta)).
[[nodiscard]] std::complex<double> eval_psi(const LevyModel& model, double theta);

// Characteristic function of one jump (compound Poisson only).
[[nodiscard]] std::complex<double> jump_characteristic_function(const JumpLaw& law,
                                                                double theta);

struct ProbabilityEstimate {
  double value = 0.0;
  double abs_error = 0.0;  // quadrature error estimate; 0 for closed forms
  bool converged = true;
  const char* method = "closed_form";
};

// P{X_t in [a t, b t]}. Closed forms for Brownian motion with drift and for
// Poisson mixtures with two-point or Gaussian jumps; one-dimensional
// quadrature for Laplace jumps without a Gaussian part; characteristic
// function inversion otherwise.
[[nodiscard]] ProbabilityEstimate marginal_interval_prob(const LevyModel& model, double t,
                                                         double a, double b);

}  // namespace lipminor
