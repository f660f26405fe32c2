#include "lipminor/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lipminor/error.hpp"

namespace lipminor {

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values,
                       std::vector<JumpMark> jumps)
    : times_(std::move(times)), values_(std::move(values)), jumps_(std::move(jumps)) {
  if (times_.size() != values_.size()) {
    throw InputError("path: times and values differ in length (" +
                     std::to_string(times_.size()) + " vs " +
                     std::to_string(values_.size()) + ")");
  }
  if (times_.size() < 2) {
    throw InputError("path: at least two samples are required");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw InputError("path: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw InputError("path: times not strictly increasing at index " +
                       std::to_string(i));
    }
    if (times_[i] == 0.0) origin_ = i;
  }
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const JumpMark& j = jumps_[k];
    if (j.index >= times_.size()) {
      throw InputError("path: jump index " + std::to_string(j.index) + " out of range");
    }
    if (k > 0 && j.index <= jumps_[k - 1].index) {
      throw InputError("path: jump indices must be strictly increasing");
    }
    if (!std::isfinite(j.left_value)) {
      throw InputError("path: non-finite left value at index " + std::to_string(j.index));
    }
    if (j.left_value == values_[j.index]) {
      throw InputError("path: declared jump at index " + std::to_string(j.index) +
                       " has equal left and right values");
    }
  }
}

std::optional<double> CadlagPath::left_value(std::size_t i) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), i,
                             [](const JumpMark& j, std::size_t idx) { return j.index < idx; });
  if (it != jumps_.end() && it->index == i) return it->left_value;
  return std::nullopt;
}

double CadlagPath::lower_value(std::size_t i) const {
  const auto left = left_value(i);
  return left ? std::min(values_[i], *left) : values_[i];
}

std::vector<double> CadlagPath::lower_values() const {
  std::vector<double> w(values_);
  for (const JumpMark& j : jumps_) w[j.index] = std::min(w[j.index], j.left_value);
  return w;
}

std::size_t CadlagPath::sample_index_at(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

CadlagPath CadlagPath::shifted(double dt, double dv) const {
  std::vector<double> t(times_);
  std::vector<double> v(values_);
  std::vector<JumpMark> j(jumps_);
  for (double& x : t) x += dt;
  for (double& x : v) x += dv;
  for (JumpMark& m : j) m.left_value += dv;
  return CadlagPath(std::move(t), std::move(v), std::move(j));
}

}  // namespace lipminor
