#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cadlag/models.hpp"
#include "cadlag/step_function.hpp"

namespace cadlag {

/// Raised when an estimator has nothing to work with (no exceedances, no
/// windows satisfying a conditioning event, ...). The message carries counts.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Point measures and the summation functional

struct Atom {
  double time = 0.0;
  std::vector<double> mark;
};

/// Finite point measure on [0,1] x E_v. Every mark has max-norm > v.
struct PointMeasure {
  std::size_t dim = 1;
  double lower_cutoff = 0.0;
  std::vector<Atom> atoms;

  /// Throws std::invalid_argument if an atom breaks the invariants.
  void validate() const;
};

/// Cumulative per-coordinate sum of mark coordinates with u < |x^j| < inf,
/// jumping at atom times. Atoms at time 0 enter the initial value.
/// Throws std::invalid_argument for u < lower_cutoff.
StepFunction summation_functional(const PointMeasure& eta, double u);

struct LambdaReport {
  bool member = true;
  std::vector<std::string> violations;
};

/// Checks the continuity set of the summation functional: no atom with
/// norm > u at times 0 or 1, no coordinate of magnitude exactly u or
/// infinite, and at every time the atoms with all coordinates nonzero
/// occupy at most one open orthant.
LambdaReport lambda_membership(const PointMeasure& eta, double u);

struct ProbeResult {
  double input_perturbation = 0.0;
  double output_distance = 0.0;
};

/// Perturbs atom times by U(-jitter, jitter) and marks so that, in every
/// coordinate, the absolute perturbations sum to at most `jitter`; returns
/// the realised perturbation size and d_p(psi(eta'), psi(eta)). The noise is
/// drawn from `seed` and scaled by `jitter`, so calls that differ only in
/// `jitter` use common random numbers.
///
/// Requires eta in Lambda, mark coordinates at distance > jitter from u,
/// atoms with norm > u at times in (jitter, 1 - jitter), distinct atom times
/// more than 2 jitter apart, and same-sign counted coordinates among atoms
/// sharing a time. Throws std::invalid_argument otherwise.
ProbeResult psi_continuity_probe(const PointMeasure& eta, double u, double jitter,
                                 std::uint64_t seed, double tol = 1e-5);

// ---------------------------------------------------------------------------
// Partial sums

/// E[(Z/a) 1{u < |Z|/a <= 1}] for a standard Pareto Z (symmetric: 0).
double pareto_truncated_mean(double alpha, double a, double u, bool symmetric);

/// Per-coordinate centring E[(X^j/a) 1{u < |X^j|/a <= 1}] for the
/// Pareto-driven models. Throws std::invalid_argument for SRE.
std::vector<double> model_centering(const ModelConfig& model, double alpha, double a,
                                    double u = 0.0);

/// V_n(t) = sum_{k <= nt} X_k / a_n - floor(nt) c with a_n = n^(1/alpha) and
/// the closed-form centring c of the sample's model.
StepFunction partial_sum_process(const Sample& sample, double alpha);

/// Same with explicit normalisation and centring (one entry per coordinate).
StepFunction partial_sum_process(const Sample& sample, double an,
                                 std::span<const double> centering);

/// V_n^(u): only entries with |X_k^j| / a_n > u, centred by the
/// (u,1]-truncated mean. Throws std::invalid_argument unless 0 < u <= 1.
StepFunction truncated_partial_sum(const Sample& sample, double alpha, double u);
StepFunction truncated_partial_sum(const Sample& sample, double an, double u,
                                   std::span<const double> centering);

/// max_k || sum_{i <= k} (X_i^j / a_n 1{|X_i^j| / a_n <= u} - E[...]) ||,
/// which equals sup_t ||V_n(t) - V_n^(u)(t)||.
double small_jump_statistic(const Sample& sample, double alpha, double u);
double small_jump_statistic(const Sample& sample, double an, double u,
                            std::span<const double> centering);

// ---------------------------------------------------------------------------
// Exceedances and clusters

/// Max-norm of every row.
std::vector<double> row_norms(const Sample& sample);

/// Atoms (i/n, X_i / a_n) with ||X_i|| / a_n > u.
PointMeasure exceedance_process(const Sample& sample, double an, double u);

/// One block of r_n consecutive observations whose maximum norm exceeds
/// a_n u; `marks` holds the whole block scaled by 1 / (a_n u).
struct ClusterSample {
  std::size_t block = 0;
  /// 0-based index of the block's first exceedance.
  std::size_t first_exceedance = 0;
  std::size_t dim = 1;
  std::vector<double> marks;

  std::size_t length() const { return marks.size() / dim; }
  std::span<const double> mark(std::size_t i) const { return {marks.data() + i * dim, dim}; }
  /// Marks with norm > 1.
  std::size_t exceedances() const;
};

/// Default block length floor(n^0.6).
std::size_t default_block_length(std::size_t n);

/// Blocks [k r_n, (k+1) r_n), k < floor(n / r_n), that exceed a_n u.
/// Throws std::invalid_argument unless 1 <= r_n <= n.
std::vector<ClusterSample> extract_clusters(const Sample& sample, double an, double u,
                                            std::size_t r_n);

/// Per-block counts behind the blocks estimator; counts from several
/// replications can be concatenated.
struct BlockCounts {
  std::vector<double> exceeded;     // 1 if the block maximum exceeds a_n u
  std::vector<double> exceedances;  // number of exceedances in the block
  void append(const BlockCounts& other);
};
BlockCounts count_blocks(const Sample& sample, double an, double u, std::size_t r_n);

struct Estimate {
  double value = 0.0;
  std::optional<double> stderr_value;
  std::size_t effective_count = 0;
};

/// (#blocks exceeding) / (#exceedances in covered blocks), the ratio
/// P(M_{r_n} > a_n u) / (r_n P(||X|| > a_n u)) with both probabilities
/// estimated over the same blocks; delta-method error over blocks.
/// Throws EstimationError when there is no exceedance.
Estimate estimate_theta_blocks(const BlockCounts& counts);
Estimate estimate_theta_blocks(const Sample& sample, double an, double u, std::size_t r_n);

// ---------------------------------------------------------------------------
// Tail process

/// X_{t-m..t+m} / threshold around an index t with ||X_t|| > threshold.
struct TailWindow {
  std::size_t center_index = 0;
  std::size_t m = 0;
  std::size_t dim = 1;
  std::vector<double> values;  // (2m+1) rows of dim entries
  double norm_at_center = 0.0;
  /// Runs cluster: consecutive exceedances at most m apart share a group.
  std::size_t group = 0;

  /// Row at offset i in [-m, m].
  std::span<const double> at(std::ptrdiff_t i) const {
    return {values.data() + static_cast<std::size_t>(i + static_cast<std::ptrdiff_t>(m)) * dim,
            dim};
  }
};

/// Windows for every exceedance of `threshold` whose window fits inside the
/// sample. Group ids start at `first_group`.
std::vector<TailWindow> estimate_tail_process(const Sample& sample, double threshold,
                                              std::size_t m, std::size_t first_group = 0);

/// Mean of max(1 - sup_{i>=1} ||Theta_i||^alpha, 0) with
/// Theta_i = window_i / ||window_0||; error clustered by group.
/// Throws std::invalid_argument for empty input.
Estimate theta_from_spectral(std::span<const TailWindow> windows, double alpha);

struct NuPoint {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> stderr_value;
};

/// nu^(u)((x, inf)) for scalar windows, for each x in `x_grid`: u^-alpha times
/// the frequency of { u sum_{i>=0} Y_i 1{|Y_i| > 1} > x, sup_{i<=-1} |Y_i| <= 1 }.
std::vector<NuPoint> nu_u_estimate(std::span<const TailWindow> windows, double alpha, double u,
                                   std::span<const double> x_grid);

/// nu^(u)((lower, upper]) for a product box in R^d.
NuPoint nu_u_box(std::span<const TailWindow> windows, double alpha, double u,
                 std::span<const double> lower, std::span<const double> upper);

/// Closed form of nu^(u)((x, inf)) for i.i.d. nonnegative Pareto noise.
double nu_u_iid_closed_form(double alpha, double u, double x);

struct SignCheck {
  /// Per coordinate: no window holds both signs in that coordinate.
  std::vector<bool> coordinates;
  std::size_t windows_checked = 0;
  std::size_t windows_failing = 0;
  bool passed() const { return windows_failing == 0; }
};
SignCheck opposite_sign_check(std::span<const TailWindow> windows);

/// Frequency, over exceedances t of a_n u, of some ||X_{t+i}|| > a_n u with
/// m <= |i| <= r_n (indices outside the sample ignored).
Estimate anticluster_statistic(const Sample& sample, double an, double u, std::size_t m,
                               std::size_t r_n);

// ---------------------------------------------------------------------------
// Truncated moments

/// E[X 1{X <= y}] / (y P(X > y)) for nonnegative Pareto X with
/// y = u n^(1/alpha). Throws std::invalid_argument unless 0 < alpha < 1.
double karamata_ratio(double alpha, double u, std::size_t n);

/// Same ratio estimated from the norms of a sample, with delta-method error.
Estimate karamata_ratio_empirical(const Sample& sample, double alpha, double u);

}  // namespace cadlag
