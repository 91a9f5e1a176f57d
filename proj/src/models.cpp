#include "cadlag/models.hpp"

#include <cmath>
#include <stdexcept>

#include "cadlag/random.hpp"

namespace cadlag {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("tail index alpha must lie in (0,2)");
  }
}

double pareto(Stream& s, double inv_alpha) {
  return std::pow(s.uniform_open_closed(), -inv_alpha);
}

}  // namespace

void ModelConfig::validate() const {
  check_alpha(alpha);
  if (n < 1) throw std::invalid_argument("sample length must be >= 1");
  if (kind == ModelKind::sre) {
    if (sre_dim < 1) throw std::invalid_argument("SRE dimension must be >= 1");
    if (sre_a_upper && !(*sre_a_upper >= 0.0)) {
      throw std::invalid_argument("SRE coefficient bound must be >= 0");
    }
  }
}

std::size_t ModelConfig::dim() const {
  switch (kind) {
    case ModelKind::lagged:
      return q + 1;
    case ModelKind::sre:
      return sre_dim;
    default:
      return 1;
  }
}

std::string ModelConfig::name() const {
  switch (kind) {
    case ModelKind::lagged:
      return "lagged(" + std::to_string(q) + ")";
    case ModelKind::sre:
      return "sre(" + std::to_string(sre_dim) + ")";
    default:
      return to_string(kind);
  }
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "iid_pareto") return ModelKind::iid_pareto;
  if (name == "iid_symmetric_pareto") return ModelKind::iid_symmetric_pareto;
  if (name == "lagged") return ModelKind::lagged;
  if (name == "sre") return ModelKind::sre;
  throw std::invalid_argument("unknown model '" + name + "'");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::iid_pareto:
      return "iid_pareto";
    case ModelKind::iid_symmetric_pareto:
      return "iid_symmetric_pareto";
    case ModelKind::lagged:
      return "lagged";
    case ModelKind::sre:
      return "sre";
  }
  return "unknown";
}

Sample sample_pareto(double alpha, std::size_t n, std::uint64_t seed, bool symmetric) {
  check_alpha(alpha);
  Sample out;
  out.dim = 1;
  out.n = n;
  out.config.kind = symmetric ? ModelKind::iid_symmetric_pareto : ModelKind::iid_pareto;
  out.config.alpha = alpha;
  out.config.n = n;
  out.config.seed = seed;
  out.values.resize(n);
  Stream s(seed);
  const double inv_alpha = 1.0 / alpha;
  for (auto& v : out.values) {
    v = pareto(s, inv_alpha);
    if (symmetric) v *= s.sign();
  }
  return out;
}

double normalizing_an(double alpha, std::size_t n) {
  check_alpha(alpha);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return std::pow(static_cast<double>(n), 1.0 / alpha);
}

Sample simulate_lagged(double alpha, std::size_t q, std::size_t n, std::uint64_t seed) {
  check_alpha(alpha);
  // z[k] holds Z_{k+1-q}, k = 0..n+q-1, so Z_t = z[t+q-1].
  const auto z = sample_pareto(alpha, n + q, seed, false).values;
  Sample out;
  out.dim = q + 1;
  out.n = n;
  out.config.kind = ModelKind::lagged;
  out.config.alpha = alpha;
  out.config.q = q;
  out.config.n = n;
  out.config.seed = seed;
  out.values.resize(n * (q + 1));
  for (std::size_t t = 1; t <= n; ++t) {
    for (std::size_t j = 0; j <= q; ++j) {
      out.values[(t - 1) * (q + 1) + j] = z[t + q - j - 1];
    }
  }
  return out;
}

double kesten_uniform_upper(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Kesten index must be positive");
  return std::pow(alpha + 1.0, 1.0 / alpha);
}

namespace {

Sample run_sre(const ModelConfig& c) {
  c.validate();
  const std::size_t d = c.sre_dim;
  const double upper = c.sre_a_upper.value_or(kesten_uniform_upper(c.alpha));
  Sample out;
  out.dim = d;
  out.n = c.n;
  out.config = c;
  out.values.resize(c.n * d);
  Stream s(c.seed);
  std::vector<double> x(d, 0.0);
  const std::size_t total = c.burn_in + c.n;
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      const double a = upper * s.uniform_open_closed();
      const double b = c.sre_unit_b ? 1.0 : s.uniform_open_closed();
      x[j] = a * x[j] + b;
      if (!std::isfinite(x[j])) {
        throw std::overflow_error("SRE diverged at step " + std::to_string(t) + ", coordinate " +
                                  std::to_string(j) + " (A upper bound " +
                                  std::to_string(upper) + ")");
      }
    }
    if (t >= c.burn_in) {
      std::copy(x.begin(), x.end(), out.values.begin() + (t - c.burn_in) * d);
    }
  }
  return out;
}

}  // namespace

Sample simulate_sre(double alpha_target, std::size_t d, std::size_t n, std::size_t burn_in,
                    std::uint64_t seed) {
  ModelConfig c;
  c.kind = ModelKind::sre;
  c.alpha = alpha_target;
  c.sre_dim = d;
  c.n = n;
  c.burn_in = burn_in;
  c.seed = seed;
  return run_sre(c);
}

Sample simulate(const ModelConfig& config) {
  config.validate();
  Sample s;
  switch (config.kind) {
    case ModelKind::iid_pareto:
      s = sample_pareto(config.alpha, config.n, config.seed, false);
      break;
    case ModelKind::iid_symmetric_pareto:
      s = sample_pareto(config.alpha, config.n, config.seed, true);
      break;
    case ModelKind::lagged:
      s = simulate_lagged(config.alpha, config.q, config.n, config.seed);
      break;
    case ModelKind::sre:
      return run_sre(config);
  }
  s.config = config;
  return s;
}

double marginal_tail_constant(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::iid_pareto:
    case ModelKind::iid_symmetric_pareto:
      return 1.0;
    case ModelKind::lagged:
      return static_cast<double>(config.q + 1);
    case ModelKind::sre:
      break;
  }
  throw std::invalid_argument("no closed-form tail constant for " + config.name());
}

std::optional<double> known_extremal_index(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::iid_pareto:
    case ModelKind::iid_symmetric_pareto:
      return 1.0;
    case ModelKind::lagged:
      return 1.0 / static_cast<double>(config.q + 1);
    case ModelKind::sre:
      break;
  }
  return std::nullopt;
}

}  // namespace cadlag
