#include "lipminor/simulate.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "lipminor/error.hpp"
#include "lipminor/rng.hpp"

namespace lipminor {
namespace {

constexpr std::uint32_t kGaussChannel = 0;
constexpr std::uint32_t kJumpTimeChannel = 1;
constexpr std::uint32_t kJumpSizeChannel = 2;
constexpr std::uint32_t kStableChannel = 3;

double draw_jump(const JumpLaw& law, PhiloxStream& rng) {
  if (const auto* tp = std::get_if<TwoPointJumps>(&law)) {
    return rng.uniform_open() < tp->p_up ? tp->up : tp->down;
  }
  if (const auto* g = std::get_if<GaussianJumps>(&law)) {
    boost::random::normal_distribution<double> normal;
    return g->mean + g->sd * normal(rng);
  }
  const auto& lap = std::get<SymmetricExponentialJumps>(law);
  const double u = rng.uniform_open();
  return u < 0.5 ? lap.scale * std::log(2.0 * u) : -lap.scale * std::log(2.0 * (1.0 - u));
}

// Chambers-Mallows-Stuck, symmetric case: characteristic function exp(-|t|^index).
double draw_symmetric_stable(double index, PhiloxStream& rng) {
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = -std::log(rng.uniform_open());
  return std::sin(index * v) / std::pow(std::cos(v), 1.0 / index) *
         std::pow(std::cos((1.0 - index) * v) / w, (1.0 - index) / index);
}

}  // namespace

std::size_t steps_per_side(double window, double dt) {
  if (!(window > 0.0) || !std::isfinite(window)) throw ParameterError("window must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be > 0");
  const double ratio = window / dt;
  if (ratio > static_cast<double>(kMaxStepsPerSide)) {
    throw ParameterError("window / dt exceeds the grid cap");
  }
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
    throw ParameterError("window / dt must be an integer");
  }
  return static_cast<std::size_t>(n);
}

void simulate_half(const LevyModel& model, std::size_t steps, double dt, std::uint64_t seed,
                   std::uint64_t replicate_id, std::uint32_t side, HalfPath& out) {
  out.y.assign(steps + 1, 0.0);
  out.jump_sum.assign(steps + 1, 0.0);
  double* y = out.y.data();

  // Continuous part (drift, Gaussian, stable) as increments first.
  const double mean_step = model.drift * dt;
  for (std::size_t k = 1; k <= steps; ++k) y[k] = mean_step;
  if (model.sigma2 > 0.0) {
    PhiloxStream rng({seed, replicate_id, side, kGaussChannel});
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(model.sigma2 * dt));
    for (std::size_t k = 1; k <= steps; ++k) y[k] += normal(rng);
  }
  if (const auto* st = std::get_if<SymmetricStable>(&model.jumps)) {
    PhiloxStream rng({seed, replicate_id, side, kStableChannel});
    const double s = st->scale * std::pow(dt, 1.0 / st->index);
    for (std::size_t k = 1; k <= steps; ++k) y[k] += s * draw_symmetric_stable(st->index, rng);
  }
  if (const auto* cp = std::get_if<CompoundPoisson>(&model.jumps)) {
    PhiloxStream times({seed, replicate_id, side, kJumpTimeChannel});
    PhiloxStream sizes({seed, replicate_id, side, kJumpSizeChannel});
    boost::random::exponential_distribution<double> gap(cp->rate);
    const double horizon = static_cast<double>(steps) * dt;
    for (double tau = gap(times); tau <= horizon; tau += gap(times)) {
      auto cell = static_cast<std::size_t>(std::ceil(tau / dt));
      cell = std::clamp<std::size_t>(cell, 1, steps);
      out.jump_sum[cell] += draw_jump(cp->law, sizes);
    }
    for (std::size_t k = 1; k <= steps; ++k) y[k] += out.jump_sum[k];
  }
  for (std::size_t k = 1; k <= steps; ++k) y[k] += y[k - 1];
}

CadlagPath simulate_path(const LevyModel& model, const SimConfig& cfg) {
  model.validate();
  const std::size_t n = steps_per_side(cfg.window, cfg.dt);
  HalfPath pos;
  HalfPath neg;
  simulate_half(model, n, cfg.dt, cfg.seed, cfg.replicate_id, 0, pos);
  simulate_half(model, n, cfg.dt, cfg.seed, cfg.replicate_id, 1, neg);

  std::vector<double> times(2 * n + 1);
  std::vector<double> values(2 * n + 1);
  for (std::size_t k = 0; k <= 2 * n; ++k) {
    times[k] = (static_cast<double>(k) - static_cast<double>(n)) * cfg.dt;
  }
  for (std::size_t k = 0; k <= n; ++k) {
    values[n + k] = pos.y[k];
    values[n - k] = -neg.y[k];
  }
  values[n] = 0.0;

  std::vector<JumpMark> jumps;
  if (model.is_compound_poisson()) {
    // A jump of Y' in cell ((k-1) dt, k dt] is a jump of the same size of X
    // at -tau, snapped to the grid time -(k-1) dt.
    for (std::size_t k = n; k >= 1; --k) {
      const double jump = neg.jump_sum[k];
      const std::size_t idx = n - (k - 1);
      const double left = values[idx] - jump;
      if (jump != 0.0 && left != values[idx]) jumps.push_back({idx, left});
    }
    for (std::size_t k = 1; k <= n; ++k) {
      const double jump = pos.jump_sum[k];
      const std::size_t idx = n + k;
      const double left = values[idx] - jump;
      if (jump != 0.0 && left != values[idx]) jumps.push_back({idx, left});
    }
  }
  return CadlagPath(std::move(times), std::move(values), std::move(jumps));
}

}  // namespace lipminor
