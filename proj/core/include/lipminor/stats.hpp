#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lipminor::stats {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // standard error of the mean
};

[[nodiscard]] Summary summarize(std::span<const double> xs);

// Standard error of an empirical fraction p over n trials.
[[nodiscard]] double binomial_se(double p, std::size_t n);

// sup_x |F_n(x) - F(x)| for a continuous reference CDF.
[[nodiscard]] double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov p-value for distance d at sample size n.
[[nodiscard]] double ks_pvalue(double d, std::size_t n);

// Empirical fraction of xs falling in each of the bins [edges[i], edges[i+1]).
[[nodiscard]] std::vector<double> bin_fractions(std::span<const double> xs,
                                                std::span<const double> edges);

}  // namespace lipminor::stats
