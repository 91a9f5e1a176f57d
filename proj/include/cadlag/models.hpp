#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cadlag {

enum class ModelKind { iid_pareto, iid_symmetric_pareto, lagged, sre };

/// Stationary heavy-tailed model with tail index alpha in (0,2).
///
/// Pareto-driven models use exact Pareto noise, P(|Z| > x) = x^-alpha for
/// x >= 1. `lagged` stacks q+1 consecutive values of one nonnegative Pareto
/// stream, X_t = (Z_t, ..., Z_{t-q}). `sre` iterates X_t = A_t X_{t-1} + B_t
/// with diagonal A_t, entries i.i.d. Uniform(0, c), and B_t entries
/// i.i.d. Uniform(0,1] (or identically 1 when `sre_unit_b`).
struct ModelConfig {
  ModelKind kind = ModelKind::iid_pareto;
  double alpha = 1.5;
  std::size_t q = 1;
  std::size_t sre_dim = 1;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t burn_in = 10000;
  /// Upper end c of the A_t entry law; unset means calibrated to alpha.
  std::optional<double> sre_a_upper;
  bool sre_unit_b = false;

  void validate() const;
  std::size_t dim() const;
  /// e.g. "iid_pareto", "lagged(3)", "sre(2)".
  std::string name() const;
  bool nonnegative() const { return kind != ModelKind::iid_symmetric_pareto; }
  bool pareto_marginals() const { return kind != ModelKind::sre; }
};

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

/// n values in R^d, row-major.
struct Sample {
  std::size_t dim = 1;
  std::size_t n = 0;
  std::vector<double> values;
  ModelConfig config;

  std::span<const double> row(std::size_t t) const { return {values.data() + t * dim, dim}; }
};

/// i.i.d. Pareto(alpha); `symmetric` attaches an independent fair sign.
Sample sample_pareto(double alpha, std::size_t n, std::uint64_t seed, bool symmetric);

/// a_n solving n P(|Z| > a_n) = 1 for Pareto noise, i.e. n^(1/alpha).
double normalizing_an(double alpha, std::size_t n);

/// Lagged process built from one nonnegative Pareto stream; q pre-samples
/// make X_1 = (Z_1, Z_0, ..., Z_{1-q}) well defined.
Sample simulate_lagged(double alpha, std::size_t q, std::size_t n, std::uint64_t seed);

/// Upper end c of Uniform(0,c) with E[A^alpha] = c^alpha / (alpha + 1) = 1.
double kesten_uniform_upper(double alpha);

Sample simulate_sre(double alpha_target, std::size_t d, std::size_t n, std::size_t burn_in,
                    std::uint64_t seed);

/// Dispatch on `config.kind`.
Sample simulate(const ModelConfig& config);

/// Constant C in n P(||X_1|| > a_n u) -> C u^-alpha for the Pareto models
/// under the max-norm (1 for i.i.d., q+1 for lagged).
double marginal_tail_constant(const ModelConfig& config);

/// Extremal index for the models where it is known in closed form.
std::optional<double> known_extremal_index(const ModelConfig& config);

}  // namespace cadlag
