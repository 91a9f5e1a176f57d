#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cadlag/models.hpp"

namespace cadlag {

/// alpha-stable law in the S1 parameterisation: characteristic exponent
/// -scale^a |z|^a (1 - i skew sgn(z) tan(pi a / 2)) + i location z for a != 1 and
/// -scale |z| (1 + i skew (2/pi) sgn(z) log|z|) + i location z for a = 1.
struct StableParams {
  double alpha = 1.5;
  double skew = 0.0;
  double scale = 1.0;
  double location = 0.0;

  void validate() const;
  /// Law of c X for c > 0.
  StableParams scaled(double c) const;
};

std::vector<double> sample_stable(const StableParams& params, std::size_t count,
                                  std::uint64_t seed);

/// Convenience overload with location 0.
std::vector<double> sample_stable(double alpha, double skew, double scale, std::size_t count,
                                  std::uint64_t seed);

/// Distribution function, accurate to about 1e-9 away from the extreme tails.
double stable_cdf(const StableParams& params, double x);

/// Log characteristic function at real z, returned as (real, imag).
struct Complex2 {
  double re;
  double im;
};
Complex2 stable_log_cf(const StableParams& params, double z);

/// Law of V(1) for the limit of the centred partial sum process.
///
/// For i.i.d. Pareto noise the Levy measure is the limit measure of
/// n P(Z / a_n in .), with mass c_+ x^-(1+a) dx on (0,inf) and
/// c_- |x|^-(1+a) dx on (-inf,0); the truncation at |x| <= 1 matches the
/// centring of V_n, so the drift of the characteristic triple is zero.
/// `lagged(q)` refers to the sum of the q+1 coordinates, which is
/// asymptotically q+1 times one coordinate. SRE is not supported.
StableParams stable_limit_params(double alpha, const ModelConfig& model);

/// Same conversion for an arbitrary power Levy measure with densities
/// c_plus x^-(1+a) and c_minus |x|^-(1+a), truncation function 1{|x|<=1}.
StableParams stable_params_from_levy(double alpha, double c_plus, double c_minus);

}  // namespace cadlag
