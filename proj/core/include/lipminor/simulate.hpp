#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lipminor/levy_model.hpp"
#include "lipminor/path.hpp"

namespace lipminor {

// Hard cap on grid steps per side.
inline constexpr std::size_t kMaxStepsPerSide = std::size_t{1} << 27;

struct SimConfig {
  double window = 20.0;  // grid covers [-window, window]
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t replicate_id = 0;
};

// window / dt as an integer; throws ParameterError when it is not one (to a
// relative 1e-9) or exceeds kMaxStepsPerSide.
[[nodiscard]] std::size_t steps_per_side(double window, double dt);

// One side of a two-sided path: values y[k] = Y(k dt) for k = 0..n with
// y[0] = 0, and jump_sum[k] the total size of the jumps in the cell
// ((k-1) dt, k dt] (jump_sum[0] = 0).
struct HalfPath {
  std::vector<double> y;
  std::vector<double> jump_sum;
};

// Simulates one side from the stream (seed, replicate_id, side, *). Side 0
// feeds t >= 0 and side 1 the reflected half.
void simulate_half(const LevyModel& model, std::size_t steps, double dt, std::uint64_t seed,
                   std::uint64_t replicate_id, std::uint32_t side, HalfPath& out);

// Two-sided path on the grid t_k = (k - n) dt, k = 0..2n, with X_0 = 0.
// X(t) = Y(t) for t >= 0 and X(-t) = -Y'(t) for an independent copy Y'.
// Jumps are snapped to the right end of their grid cell and recorded with
// their left limit.
[[nodiscard]] CadlagPath simulate_path(const LevyModel& model, const SimConfig& cfg);

}  // namespace lipminor
