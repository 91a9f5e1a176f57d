#include "cadlag/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cadlag {

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

double frechet_cdf(double alpha, double x) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Frechet alpha must be positive");
  return x > 0.0 ? std::exp(-std::pow(x, -alpha)) : 0.0;
}

double exponential_cdf(double rate, double x) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return x > 0.0 ? -std::expm1(-rate * x) : 0.0;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> standard_error(std::span<const double> v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double quantile(std::span<const double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0,1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

std::optional<double> median_standard_error(std::span<const double> v) {
  if (v.size() < 10) return std::nullopt;
  // Order statistics at n/2 -+ sqrt(n)/2 bracket the median with ~68% coverage.
  const double n = static_cast<double>(v.size());
  const double half_width = 0.5 * std::sqrt(n) / n;
  const double lo = quantile(v, std::max(0.0, 0.5 - half_width));
  const double hi = quantile(v, std::min(1.0, 0.5 + half_width));
  return 0.5 * (hi - lo);
}

double hill_estimator(std::span<const double> values, std::size_t k) {
  std::vector<double> pos;
  pos.reserve(values.size());
  for (double x : values) {
    if (x > 0.0) pos.push_back(x);
  }
  if (k < 1 || k >= pos.size()) throw std::invalid_argument("Hill estimator needs 1 <= k < #positive");
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k), pos.end(),
                   std::greater<>());
  const double threshold = pos[k];
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(pos[i] / threshold);
  return static_cast<double>(k) / s;
}

RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den) {
  if (num.size() != den.size() || num.empty()) {
    throw std::invalid_argument("ratio estimate needs equal nonempty groups");
  }
  const double sn = std::accumulate(num.begin(), num.end(), 0.0);
  const double sd = std::accumulate(den.begin(), den.end(), 0.0);
  if (!(sd > 0.0)) throw std::domain_error("ratio estimate with zero denominator");
  RatioEstimate r;
  r.value = sn / sd;
  const std::size_t g = num.size();
  if (g < 2) return r;
  const double dbar = sd / static_cast<double>(g);
  double ss = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double e = num[i] - r.value * den[i];
    ss += e * e;
  }
  const double gn = static_cast<double>(g);
  r.stderr_value = std::sqrt(ss / (gn - 1.0) / gn) / dbar;
  return r;
}

}  // namespace cadlag
