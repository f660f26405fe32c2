#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lipminor/path.hpp"

namespace lipminor {

inline constexpr double kMonteCarloContactTol = 1e-12;

struct MinorantOptions {
  // Width of the band at each end of the window inside which an achieving
  // apex marks an index as contaminated. Empty selects default_guard().
  std::optional<double> guard;
  // Index i is a contact when lower_value(i) - m[i] <= tol.
  double tol = kMonteCarloContactTol;
};

struct MinorantResult {
  std::vector<double> m;
  std::vector<std::uint8_t> contact_mask;
  // Apex of the cone achieving the forward (left) and backward (right) scan
  // minimum at each index. Ties keep the apex found first in scan order.
  std::vector<std::size_t> argmin_left;
  std::vector<std::size_t> argmin_right;
  std::vector<std::uint8_t> contaminated;
  double alpha = 0.0;
  double tol = 0.0;
  double guard = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return m.size(); }
  [[nodiscard]] bool is_contact(std::size_t i) const { return contact_mask[i] != 0; }
  [[nodiscard]] bool is_contaminated(std::size_t i) const { return contaminated[i] != 0; }
  [[nodiscard]] std::size_t contact_count() const;
};

// alpha^-1 * (value range of the path), clipped to 10% of the window length.
[[nodiscard]] double default_guard(const CadlagPath& path, double alpha);

// 1e-9 * max(1, max |lower_value|): contact tolerance for analytic fixtures.
[[nodiscard]] double analytic_tolerance(const CadlagPath& path);

// alpha-Lipschitz minorant of the path restricted to its window (the path is
// +inf outside). Two linear scans:
//   a_i = min_{j<=i} (w_j + alpha (t_i - t_j)),  b_i = min_{j>=i} (w_j + alpha (t_j - t_i)),
// m_i = min(a_i, b_i). Each scan carries the running minimiser of w_j -/+ alpha t_j
// and evaluates the cone from that apex directly, so no rounding accumulates.
[[nodiscard]] MinorantResult compute_minorant(const CadlagPath& path, double alpha,
                                              const MinorantOptions& options = {});

// Overload that reuses the buffers of `out`.
void compute_minorant(const CadlagPath& path, double alpha, const MinorantOptions& options,
                      MinorantResult& out);

// Inclusive range of consecutive indices.
struct IndexRun {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const IndexRun&, const IndexRun&) = default;
};

// Maximal runs of uncontaminated contact indices, in time order.
[[nodiscard]] std::vector<IndexRun> extract_contact_set(const MinorantResult& result);

// Component of the complement of the contact set that straddles zero.
struct StraddleInterval {
  double g = 0.0;  // last contact before 0
  double d = 0.0;  // first contact after 0
  double t = 0.0;  // apex of the sawtooth on [g, d]
  double k = 0.0;  // d - g
  double h = 0.0;  // X_T - M_T
  double l = 0.0;  // t - g
  double r = 0.0;  // d - t
  double s = 0.0;  // first passage time used by the recipe for D
  std::size_t g_index = 0;
  std::size_t d_index = 0;
  bool degenerate = false;  // zero itself is a contact
};

// Requires a path with an origin sample. Throws ContaminationError when no
// uncontaminated contact exists on one side of zero or when G or D lies in
// the guard band; the caller discards such samples.
[[nodiscard]] StraddleInterval straddle_interval(const CadlagPath& path,
                                                 const MinorantResult& result);

struct RecipeResult {
  std::size_t s_index = 0;
  std::size_t e_index = 0;
  double s = 0.0;
  double e = 0.0;
};

// Construction of D from the path alone:
//   S = first t > 0 with w(t) - alpha t <= min_{u<=0} (w(u) - alpha u),
//   e = first t >= S attaining min_{u>=S} (w(u) + alpha (u - S)).
// Throws PreconditionError if f(S) > f(S-), ContaminationError when S does
// not exist in the window or S, e or the left infimum sit on the boundary.
[[nodiscard]] RecipeResult recipe_d(const CadlagPath& path, double alpha);

struct SawtoothGap {
  std::size_t left_contact = 0;
  std::size_t right_contact = 0;
  double max_deviation = 0.0;  // distance of m from the two-line sawtooth
  bool pass = false;
};

struct SawtoothReport {
  std::vector<SawtoothGap> gaps;
  [[nodiscard]] bool all_pass() const;
};

// For each pair of consecutive contacts with non-contacts between them,
// checks that m rises with slope +alpha from the left contact and then falls
// with slope -alpha into the right contact (one slope change). `tol` bounds
// the deviation from the two lines; it defaults to 1e-9 * value scale.
[[nodiscard]] SawtoothReport sawtooth_check(const CadlagPath& path,
                                            const MinorantResult& result,
                                            std::optional<double> tol = std::nullopt);

}  // namespace lipminor
