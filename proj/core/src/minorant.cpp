#include "lipminor/minorant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipminor/error.hpp"

namespace lipminor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("minorant: alpha must be positive and finite, got " +
                         std::to_string(alpha));
  }
}

std::size_t require_origin(const CadlagPath& path) {
  const auto origin = path.origin_index();
  if (!origin) throw InputError("path has no sample at t = 0");
  return *origin;
}

// First index after the origin where w(t) - alpha t drops to the infimum of
// w(u) - alpha u over u <= 0. Returns the index of that infimum in `inf_index`.
std::optional<std::size_t> first_passage_s(const std::vector<double>& w,
                                           std::span<const double> t, std::size_t origin,
                                           double alpha, std::size_t& inf_index) {
  double inf_left = kInf;
  inf_index = 0;
  for (std::size_t i = 0; i <= origin; ++i) {
    const double key = w[i] - alpha * t[i];
    if (key < inf_left) {
      inf_left = key;
      inf_index = i;
    }
  }
  for (std::size_t i = origin + 1; i < w.size(); ++i) {
    if (w[i] - alpha * t[i] <= inf_left) return i;
  }
  return std::nullopt;
}

}  // namespace

std::size_t MinorantResult::contact_count() const {
  return static_cast<std::size_t>(std::count(contact_mask.begin(), contact_mask.end(), 1));
}

double default_guard(const CadlagPath& path, double alpha) {
  check_alpha(alpha);
  const std::vector<double> w = path.lower_values();
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return std::min((*hi - *lo) / alpha, 0.1 * path.duration());
}

double analytic_tolerance(const CadlagPath& path) {
  double scale = 1.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    scale = std::max(scale, std::abs(path.lower_value(i)));
  }
  return 1e-9 * scale;
}

MinorantResult compute_minorant(const CadlagPath& path, double alpha,
                                const MinorantOptions& options) {
  MinorantResult out;
  compute_minorant(path, alpha, options, out);
  return out;
}

void compute_minorant(const CadlagPath& path, double alpha, const MinorantOptions& options,
                      MinorantResult& out) {
  check_alpha(alpha);
  const double guard = options.guard ? *options.guard : default_guard(path, alpha);
  if (!(guard >= 0.0)) throw ParameterError("minorant: guard must be nonnegative");
  if (!(options.tol >= 0.0)) throw ParameterError("minorant: tol must be nonnegative");

  const std::size_t n = path.size();
  const auto t = path.times();
  const auto v = path.values();
  const auto jumps = path.jumps();

  out.alpha = alpha;
  out.tol = options.tol;
  out.guard = guard;
  out.m.resize(n);
  out.contact_mask.resize(n);
  out.argmin_left.resize(n);
  out.argmin_right.resize(n);
  out.contaminated.resize(n);

  // Forward scan; out.m holds a_i until the backward scan overwrites it.
  {
    double best = kInf;
    std::size_t apex = 0;
    double w_apex = 0.0;
    std::size_t jp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double wi = v[i];
      if (jp < jumps.size() && jumps[jp].index == i) wi = std::min(wi, jumps[jp++].left_value);
      const double key = wi - alpha * t[i];
      if (key < best) {
        best = key;
        apex = i;
        w_apex = wi;
      }
      out.argmin_left[i] = apex;
      out.m[i] = apex == i ? wi : std::min(wi, w_apex + alpha * (t[i] - t[apex]));
    }
  }

  const double t_first = t.front();
  const double t_last = t.back();
  double best = kInf;
  std::size_t apex = n - 1;
  double w_apex = 0.0;
  std::size_t jp = jumps.size();
  for (std::size_t ii = n; ii-- > 0;) {
    double wi = v[ii];
    if (jp > 0 && jumps[jp - 1].index == ii) wi = std::min(wi, jumps[--jp].left_value);
    const double key = wi + alpha * t[ii];
    if (key < best) {
      best = key;
      apex = ii;
      w_apex = wi;
    }
    out.argmin_right[ii] = apex;
    const double b = apex == ii ? wi : std::min(wi, w_apex + alpha * (t[apex] - t[ii]));
    const double a = out.m[ii];
    const double mi = std::min(a, b);
    out.m[ii] = mi;
    const bool contact = wi - mi <= options.tol;
    out.contact_mask[ii] = contact ? 1 : 0;
    const std::size_t achieving = contact ? ii : (a <= b ? out.argmin_left[ii] : apex);
    const double ta = t[achieving];
    out.contaminated[ii] = (ta - t_first < guard || t_last - ta < guard) ? 1 : 0;
  }
}

std::vector<IndexRun> extract_contact_set(const MinorantResult& result) {
  std::vector<IndexRun> runs;
  const std::size_t n = result.size();
  std::size_t i = 0;
  while (i < n) {
    if (result.is_contact(i) && !result.is_contaminated(i)) {
      std::size_t j = i;
      while (j + 1 < n && result.is_contact(j + 1) && !result.is_contaminated(j + 1)) ++j;
      runs.push_back({i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return runs;
}

StraddleInterval straddle_interval(const CadlagPath& path, const MinorantResult& result) {
  const std::size_t o = require_origin(path);
  if (result.size() != path.size()) {
    throw InputError("straddle_interval: minorant does not match path length");
  }
  StraddleInterval out;
  if (result.is_contact(o)) {
    if (result.is_contaminated(o)) throw ContaminationError("origin contact lies in guard band");
    out.degenerate = true;
    out.g_index = out.d_index = o;
    return out;
  }

  std::optional<std::size_t> g_idx;
  for (std::size_t i = o; i-- > 0;) {
    if (result.is_contact(i)) {
      g_idx = i;
      break;
    }
  }
  std::optional<std::size_t> d_idx;
  for (std::size_t i = o + 1; i < path.size(); ++i) {
    if (result.is_contact(i)) {
      d_idx = i;
      break;
    }
  }
  if (!g_idx || !d_idx) throw ContaminationError("no contact on one side of the origin");
  if (result.is_contaminated(*g_idx) || result.is_contaminated(*d_idx)) {
    throw ContaminationError("straddling contact lies in guard band");
  }

  const double alpha = result.alpha;
  const double g = path.time(*g_idx);
  const double d = path.time(*d_idx);
  const double wg = path.lower_value(*g_idx);
  const double wd = path.lower_value(*d_idx);

  out.g_index = *g_idx;
  out.d_index = *d_idx;
  out.g = g;
  out.d = d;
  out.k = d - g;
  out.t = (wd - wg + alpha * (d + g)) / (2.0 * alpha);
  out.l = out.t - g;
  out.r = d - out.t;
  const double peak = wg + alpha * (out.t - g);
  out.h = path.value(path.sample_index_at(out.t)) - peak;

  const std::vector<double> w = path.lower_values();
  std::size_t inf_index = 0;
  const auto s_idx = first_passage_s(w, path.times(), o, alpha, inf_index);
  if (!s_idx) throw ContaminationError("recipe time S not reached inside the window");
  out.s = path.time(*s_idx);
  return out;
}

RecipeResult recipe_d(const CadlagPath& path, double alpha) {
  check_alpha(alpha);
  const std::size_t o = require_origin(path);
  const std::vector<double> w = path.lower_values();
  const auto t = path.times();
  const std::size_t n = path.size();

  std::size_t inf_index = 0;
  const auto s_idx = first_passage_s(w, t, o, alpha, inf_index);
  if (inf_index == 0) {
    throw ContaminationError("recipe: left infimum attained at the window boundary");
  }
  if (!s_idx) throw ContaminationError("recipe: S not reached inside the window");
  if (*s_idx == n - 1) throw ContaminationError("recipe: S hits the window boundary");
  if (const auto left = path.left_value(*s_idx); left && path.value(*s_idx) > *left) {
    throw PreconditionError("recipe: f(S) > f(S-) at t = " + std::to_string(t[*s_idx]));
  }

  double best = kInf;
  std::size_t e_idx = *s_idx;
  for (std::size_t j = *s_idx; j < n; ++j) {
    const double key = w[j] + alpha * t[j];
    if (key < best) {
      best = key;
      e_idx = j;
    }
  }
  if (e_idx == n - 1) throw ContaminationError("recipe: e hits the window boundary");
  return RecipeResult{*s_idx, e_idx, t[*s_idx], t[e_idx]};
}

bool SawtoothReport::all_pass() const {
  return std::all_of(gaps.begin(), gaps.end(), [](const SawtoothGap& g) { return g.pass; });
}

SawtoothReport sawtooth_check(const CadlagPath& path, const MinorantResult& result,
                              std::optional<double> tol) {
  if (result.size() != path.size()) {
    throw InputError("sawtooth_check: minorant does not match path length");
  }
  double eps = 0.0;
  if (tol) {
    eps = *tol;
  } else {
    double scale = 1.0;
    for (double x : result.m) scale = std::max(scale, std::abs(x));
    eps = 1e-9 * scale;
  }
  const double alpha = result.alpha;
  const auto t = path.times();
  const auto& m = result.m;

  SawtoothReport report;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < result.size(); ++i) {
    if (!result.is_contact(i)) continue;
    if (prev && i > *prev + 1) {
      const std::size_t c1 = *prev;
      const std::size_t c2 = i;
      SawtoothGap gap{c1, c2, 0.0, true};
      // Rising prefix on the left line, falling suffix on the right line.
      std::size_t k = c1;
      while (k <= c2 && std::abs(m[k] - (m[c1] + alpha * (t[k] - t[c1]))) <= eps) ++k;
      for (std::size_t j = k; j <= c2; ++j) {
        if (std::abs(m[j] - (m[c2] + alpha * (t[c2] - t[j]))) > eps) gap.pass = false;
      }
      for (std::size_t j = c1; j <= c2; ++j) {
        const double dl = std::abs(m[j] - (m[c1] + alpha * (t[j] - t[c1])));
        const double dr = std::abs(m[j] - (m[c2] + alpha * (t[c2] - t[j])));
        gap.max_deviation = std::max(gap.max_deviation, std::min(dl, dr));
      }
      report.gaps.push_back(gap);
    }
    prev = i;
  }
  return report;
}

}  // namespace lipminor
