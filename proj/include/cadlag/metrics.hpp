#pragma once

#include <cstddef>
#include <span>

#include "cadlag/step_function.hpp"

namespace cadlag {

inline constexpr double kDefaultMetricTol = 1e-4;

/// Bracketed distance. `value` is always a valid upper bound on the true
/// distance; `lower_bound` is certified. On success
/// `upper_bound - lower_bound <= tol`.
struct MetricResult {
  double value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  int refinement_levels = 0;
};

/// Skorohod M1 distance between scalar step functions.
///
/// The completed graphs of scalar step paths are planar polylines, and the
/// M1 distance is the Frechet distance between them under the ground metric
/// max(|t1 - t2|, |z1 - z2|). Each trial epsilon is decided exactly by
/// propagating reachable intervals through the free-space diagram of the two
/// polylines; the cells considered are restricted to pairs of segments whose
/// time ranges lie within epsilon, which keeps long paths tractable. The
/// bracket is refined by exponential search followed by bisection.
///
/// Arguments are processed in a canonical order, so the result is exactly
/// symmetric. Throws std::invalid_argument for tol <= 0 or non-scalar input.
MetricResult m1_distance(const StepFunction& x, const StepFunction& y,
                         double tol = kDefaultMetricTol);

/// Discrete Frechet distance between the two completed graphs with every
/// polyline segment sampled at `samples_per_segment` equally spaced points
/// (endpoints included). Converges to the M1 distance from above.
double m1_oracle(const StepFunction& x, const StepFunction& y, int samples_per_segment);

/// Largest sampling step used by m1_oracle at this density; the oracle
/// overshoots the M1 distance by at most this amount.
double m1_oracle_discretization_bound(const StepFunction& x, const StepFunction& y,
                                      int samples_per_segment);

/// Product metric d_p: max over coordinates of the scalar M1 distance.
MetricResult weak_m1_distance(const StepFunction& x, const StepFunction& y,
                              double tol = kDefaultMetricTol);

/// sup_t ||x(t) - y(t)|| in the max-norm.
double uniform_distance(const StepFunction& x, const StepFunction& y);

/// Certified lower bound on the strong M1 distance, obtained from the scalar
/// paths <c,x> and <c,y>: a joint representation within eps yields scalar
/// representations within max(1, ||c||_1) * eps.
double strong_m1_lower_bound(const StepFunction& x, const StepFunction& y,
                             std::span<const double> c, double tol = kDefaultMetricTol);

}  // namespace cadlag
