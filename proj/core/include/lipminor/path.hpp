#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lipminor {

// A declared jump: the path value at `index` is the right limit f(t) and
// `left_value` is the left limit f(t-).
struct JumpMark {
  std::size_t index = 0;
  double left_value = 0.0;
};

// Sampled càdlàg path. Times are strictly increasing; values are right
// limits. Left limits are stored only where the path jumps, so that
// lower_value(i) = min(f(t_i), f(t_i-)) is the quantity the minorant is
// compared against.
class CadlagPath {
 public:
  // Validates every invariant and throws InputError on violation. The origin
  // is the index whose time is exactly zero, if there is one.
  CadlagPath(std::vector<double> times, std::vector<double> values,
             std::vector<JumpMark> jumps = {});

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const JumpMark> jumps() const noexcept { return jumps_; }
  [[nodiscard]] std::optional<std::size_t> origin_index() const noexcept {
    return origin_;
  }

  [[nodiscard]] double time(std::size_t i) const { return times_[i]; }
  [[nodiscard]] double value(std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::optional<double> left_value(std::size_t i) const;

  // min(f(t_i), f(t_i-)) for every index.
  [[nodiscard]] double lower_value(std::size_t i) const;
  [[nodiscard]] std::vector<double> lower_values() const;

  // Index i with times[i] <= t < times[i+1]; clamps to the first/last index
  // outside the sampled range.
  [[nodiscard]] std::size_t sample_index_at(double t) const;

  [[nodiscard]] double duration() const noexcept {
    return times_.back() - times_.front();
  }

  // Same path with times shifted by dt and all values shifted by dv.
  [[nodiscard]] CadlagPath shifted(double dt, double dv) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<JumpMark> jumps_;
  std::optional<std::size_t> origin_;
};

}  // namespace lipminor
