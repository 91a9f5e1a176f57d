#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace cadlag {

/// Two-sided Kolmogorov-Smirnov statistic sup |F_n - F| of `samples`
/// against a continuous distribution function.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// exp(-x^-alpha) for x > 0, 0 otherwise.
double frechet_cdf(double alpha, double x);
/// 1 - exp(-rate x) for x > 0, 0 otherwise.
double exponential_cdf(double rate, double x);

double mean(std::span<const double> v);
/// Standard error of the mean; empty when fewer than two values.
std::optional<double> standard_error(std::span<const double> v);
/// Linear-interpolation quantile (type 7), p in [0,1].
double quantile(std::span<const double> v, double p);
double median(std::span<const double> v);
/// Asymptotic standard error of the sample median from the order-statistic
/// confidence interval; empty when fewer than 10 values.
std::optional<double> median_standard_error(std::span<const double> v);

/// Hill estimator of the tail index from the k largest positive values.
double hill_estimator(std::span<const double> values, std::size_t k);

/// Ratio estimator sum(num) / sum(den) with a delta-method standard error
/// over the paired groups; the error is empty when fewer than two groups.
struct RatioEstimate {
  double value = 0.0;
  std::optional<double> stderr_value;
};
RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den);

}  // namespace cadlag
