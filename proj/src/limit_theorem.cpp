#include "cadlag/limit_theorem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "cadlag/metrics.hpp"
#include "cadlag/random.hpp"
#include "cadlag/statistics.hpp"

namespace cadlag {

namespace {

double row_norm(std::span<const double> r) { return max_norm(r); }

bool counted(double x, double u) { return std::abs(x) > u && std::isfinite(x); }

// Standard error of a mean of per-item values, clustered by group.
std::optional<double> clustered_stderr(std::span<const double> values,
                                       std::span<const std::size_t> groups, double mean_value) {
  std::map<std::size_t, double> sums;
  for (std::size_t i = 0; i < values.size(); ++i) sums[groups[i]] += values[i] - mean_value;
  const double g = static_cast<double>(sums.size());
  if (sums.size() < 2) return std::nullopt;
  double ss = 0.0;
  for (const auto& [id, s] : sums) ss += s * s;
  return std::sqrt(g / (g - 1.0) * ss) / static_cast<double>(values.size());
}

void require_rows(const Sample& sample) {
  if (sample.n == 0 || sample.values.size() != sample.n * sample.dim) {
    throw std::invalid_argument("sample must be nonempty with n * dim values");
  }
}

void require_centering(const Sample& sample, std::span<const double> centering) {
  if (centering.size() != sample.dim) {
    throw std::invalid_argument("centring needs one entry per coordinate");
  }
}

void require_level(double u) {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("truncation level u must lie in (0,1]");
}

// Step path with a jump at k/n for every k; state k = state k-1 + increment.
template <class Increment>
StepFunction cumulative_path(const Sample& sample, Increment increment) {
  const std::size_t d = sample.dim;
  const std::size_t n = sample.n;
  std::vector<double> times(n);
  std::vector<double> values(n * d);
  std::vector<double> state(d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    times[k] = static_cast<double>(k + 1) / static_cast<double>(n);
    const auto row = sample.row(k);
    for (std::size_t j = 0; j < d; ++j) {
      state[j] += increment(row[j], j);
      values[k * d + j] = state[j];
    }
  }
  return StepFunction(std::vector<double>(d, 0.0), std::move(times), std::move(values));
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

void PointMeasure::validate() const {
  if (dim == 0) throw std::invalid_argument("point measure dimension must be >= 1");
  for (const auto& a : atoms) {
    if (a.mark.size() != dim) throw std::invalid_argument("atom mark has wrong dimension");
    if (!(a.time >= 0.0 && a.time <= 1.0)) throw std::invalid_argument("atom time outside [0,1]");
    if (!(row_norm(a.mark) > lower_cutoff)) {
      throw std::invalid_argument("atom mark norm not above the lower cutoff");
    }
  }
}

StepFunction summation_functional(const PointMeasure& eta, double u) {
  eta.validate();
  if (u < eta.lower_cutoff) throw std::invalid_argument("summation level u below the cutoff v");
  const std::size_t d = eta.dim;
  std::map<double, std::vector<double>> by_time;
  for (const auto& a : eta.atoms) {
    auto& acc = by_time.try_emplace(a.time, std::vector<double>(d, 0.0)).first->second;
    for (std::size_t j = 0; j < d; ++j) {
      if (counted(a.mark[j], u)) acc[j] += a.mark[j];
    }
  }
  std::vector<double> initial(d, 0.0);
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> state(d, 0.0);
  for (const auto& [t, inc] : by_time) {
    for (std::size_t j = 0; j < d; ++j) state[j] += inc[j];
    if (t == 0.0) {
      initial = state;
      continue;
    }
    times.push_back(t);
    values.insert(values.end(), state.begin(), state.end());
  }
  return StepFunction(std::move(initial), std::move(times), std::move(values));
}

LambdaReport lambda_membership(const PointMeasure& eta, double u) {
  eta.validate();
  LambdaReport r;
  auto fail = [&](std::string msg) {
    r.member = false;
    r.violations.push_back(std::move(msg));
  };
  std::map<double, std::set<std::vector<int>>> orthants;
  for (std::size_t i = 0; i < eta.atoms.size(); ++i) {
    const auto& a = eta.atoms[i];
    const double norm = row_norm(a.mark);
    if ((a.time == 0.0 || a.time == 1.0) && norm > u) {
      fail("atom " + std::to_string(i) + " with norm above u at time " + std::to_string(a.time));
    }
    bool all_nonzero = true;
    std::vector<int> signs(eta.dim);
    for (std::size_t j = 0; j < eta.dim; ++j) {
      const double x = a.mark[j];
      if (std::abs(x) == u || std::isinf(x)) {
        fail("atom " + std::to_string(i) + " coordinate " + std::to_string(j) +
             " has magnitude u or infinity");
      }
      if (x == 0.0) all_nonzero = false;
      signs[j] = x > 0.0 ? 1 : -1;
    }
    if (all_nonzero) orthants[a.time].insert(signs);
  }
  for (const auto& [t, set] : orthants) {
    if (set.size() > 1) {
      fail(std::to_string(set.size()) + " orthants charged at time " + std::to_string(t));
    }
  }
  return r;
}

ProbeResult psi_continuity_probe(const PointMeasure& eta, double u, double jitter,
                                 std::uint64_t seed, double tol) {
  if (!(jitter >= 0.0)) throw std::invalid_argument("jitter must be nonnegative");
  const auto lambda = lambda_membership(eta, u);
  if (!lambda.member) {
    std::string msg = "measure outside the continuity set:";
    for (const auto& v : lambda.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  const std::size_t d = eta.dim;
  std::map<double, std::vector<int>> signs_at;
  for (const auto& a : eta.atoms) {
    for (double x : a.mark) {
      if (std::abs(std::abs(x) - u) <= jitter) {
        throw std::invalid_argument("mark coordinate within jitter of u");
      }
    }
    if (row_norm(a.mark) > u && !(a.time > jitter && a.time < 1.0 - jitter)) {
      throw std::invalid_argument("counted atom within jitter of the time boundary");
    }
    auto& s = signs_at.try_emplace(a.time, std::vector<int>(d, 0)).first->second;
    for (std::size_t j = 0; j < d; ++j) {
      if (!counted(a.mark[j], u)) continue;
      const int sg = a.mark[j] > 0.0 ? 1 : -1;
      if (s[j] == -sg) {
        throw std::invalid_argument("opposite-sign counted coordinates at a common time");
      }
      s[j] = sg;
    }
  }
  double previous = -1.0;
  for (const auto& [t, s] : signs_at) {
    if (previous >= 0.0 && t - previous <= 2.0 * jitter) {
      throw std::invalid_argument("distinct atom times closer than twice the jitter");
    }
    previous = t;
  }
  if (jitter == 0.0 || eta.atoms.empty()) return {};

  Stream s(seed);
  const double per_atom = jitter / static_cast<double>(eta.atoms.size());
  PointMeasure moved;
  moved.dim = d;
  moved.lower_cutoff = 0.0;
  double time_shift = 0.0;
  std::vector<double> mark_shift(d, 0.0);
  for (const auto& a : eta.atoms) {
    Atom b = a;
    const double dt = (2.0 * s.uniform_open() - 1.0) * jitter;
    b.time = std::clamp(a.time + dt, 0.0, 1.0);
    time_shift = std::max(time_shift, std::abs(b.time - a.time));
    for (std::size_t j = 0; j < d; ++j) {
      const double dx = (2.0 * s.uniform_open() - 1.0) * per_atom;
      b.mark[j] += dx;
      mark_shift[j] += std::abs(dx);
    }
    if (row_norm(b.mark) > 0.0) moved.atoms.push_back(std::move(b));
  }
  ProbeResult r;
  r.input_perturbation =
      std::max(time_shift, *std::max_element(mark_shift.begin(), mark_shift.end()));
  PointMeasure base = eta;
  base.lower_cutoff = 0.0;
  r.output_distance =
      weak_m1_distance(summation_functional(moved, u), summation_functional(base, u), tol).value;
  return r;
}

// ---------------------------------------------------------------------------

double pareto_truncated_mean(double alpha, double a, double u, bool symmetric) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("normalisation must be positive");
  if (symmetric) return 0.0;
  const double lower = std::max(1.0, u * a);
  const double upper = a;
  if (!(upper > lower)) return 0.0;
  if (std::abs(alpha - 1.0) < 1e-12) return std::log(upper / lower) / a;
  return alpha / (1.0 - alpha) * (std::pow(upper, 1.0 - alpha) - std::pow(lower, 1.0 - alpha)) /
         a;
}

std::vector<double> model_centering(const ModelConfig& model, double alpha, double a, double u) {
  if (!model.pareto_marginals()) {
    throw std::invalid_argument("no closed-form centring for " + model.name() +
                                "; pass the centring explicitly");
  }
  const double c = pareto_truncated_mean(alpha, a, u, !model.nonnegative());
  return std::vector<double>(model.dim(), c);
}

StepFunction partial_sum_process(const Sample& sample, double alpha) {
  require_rows(sample);
  const double an = normalizing_an(alpha, sample.n);
  return partial_sum_process(sample, an, model_centering(sample.config, alpha, an));
}

StepFunction partial_sum_process(const Sample& sample, double an,
                                 std::span<const double> centering) {
  require_rows(sample);
  require_centering(sample, centering);
  return cumulative_path(sample, [&](double x, std::size_t j) { return x / an - centering[j]; });
}

StepFunction truncated_partial_sum(const Sample& sample, double alpha, double u) {
  require_rows(sample);
  require_level(u);
  const double an = normalizing_an(alpha, sample.n);
  return truncated_partial_sum(sample, an, u, model_centering(sample.config, alpha, an, u));
}

StepFunction truncated_partial_sum(const Sample& sample, double an, double u,
                                   std::span<const double> centering) {
  require_rows(sample);
  require_level(u);
  require_centering(sample, centering);
  return cumulative_path(sample, [&](double x, std::size_t j) {
    const double y = x / an;
    return (std::abs(y) > u ? y : 0.0) - centering[j];
  });
}

double small_jump_statistic(const Sample& sample, double alpha, double u) {
  require_rows(sample);
  require_level(u);
  const double an = normalizing_an(alpha, sample.n);
  const auto full = model_centering(sample.config, alpha, an);
  const auto large = model_centering(sample.config, alpha, an, u);
  return small_jump_statistic(sample, an, u, difference(full, large));
}

double small_jump_statistic(const Sample& sample, double an, double u,
                            std::span<const double> centering) {
  require_rows(sample);
  require_level(u);
  require_centering(sample, centering);
  const std::size_t d = sample.dim;
  std::vector<double> state(d, 0.0);
  double best = 0.0;
  for (std::size_t k = 0; k < sample.n; ++k) {
    const auto row = sample.row(k);
    for (std::size_t j = 0; j < d; ++j) {
      const double y = row[j] / an;
      state[j] += (std::abs(y) <= u ? y : 0.0) - centering[j];
      best = std::max(best, std::abs(state[j]));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<double> row_norms(const Sample& sample) {
  std::vector<double> r(sample.n);
  for (std::size_t t = 0; t < sample.n; ++t) r[t] = row_norm(sample.row(t));
  return r;
}

PointMeasure exceedance_process(const Sample& sample, double an, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("threshold level u must be positive");
  PointMeasure pm;
  pm.dim = sample.dim;
  pm.lower_cutoff = u;
  for (std::size_t t = 0; t < sample.n; ++t) {
    const auto row = sample.row(t);
    if (row_norm(row) / an > u) {
      Atom a;
      a.time = static_cast<double>(t + 1) / static_cast<double>(sample.n);
      a.mark.reserve(sample.dim);
      for (double x : row) a.mark.push_back(x / an);
      pm.atoms.push_back(std::move(a));
    }
  }
  return pm;
}

std::size_t ClusterSample::exceedances() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < length(); ++i) {
    if (row_norm(mark(i)) > 1.0) ++c;
  }
  return c;
}

std::size_t default_block_length(std::size_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.6))));
}

namespace {

void require_block_length(const Sample& sample, std::size_t r_n) {
  if (r_n < 1 || r_n > sample.n) throw std::invalid_argument("block length must lie in [1, n]");
}

}  // namespace

std::vector<ClusterSample> extract_clusters(const Sample& sample, double an, double u,
                                            std::size_t r_n) {
  require_block_length(sample, r_n);
  if (!(u > 0.0)) throw std::invalid_argument("threshold level u must be positive");
  const double level = an * u;
  const std::size_t k_n = sample.n / r_n;
  std::vector<ClusterSample> out;
  for (std::size_t k = 0; k < k_n; ++k) {
    const std::size_t begin = k * r_n;
    std::optional<std::size_t> first;
    for (std::size_t t = begin; t < begin + r_n && !first; ++t) {
      if (row_norm(sample.row(t)) > level) first = t;
    }
    if (!first) continue;
    ClusterSample c;
    c.block = k;
    c.first_exceedance = *first;
    c.dim = sample.dim;
    c.marks.assign(sample.values.begin() + static_cast<std::ptrdiff_t>(begin * sample.dim),
                   sample.values.begin() + static_cast<std::ptrdiff_t>((begin + r_n) * sample.dim));
    for (auto& v : c.marks) v /= level;
    out.push_back(std::move(c));
  }
  return out;
}

void BlockCounts::append(const BlockCounts& other) {
  exceeded.insert(exceeded.end(), other.exceeded.begin(), other.exceeded.end());
  exceedances.insert(exceedances.end(), other.exceedances.begin(), other.exceedances.end());
}

BlockCounts count_blocks(const Sample& sample, double an, double u, std::size_t r_n) {
  require_block_length(sample, r_n);
  if (!(u > 0.0)) throw std::invalid_argument("threshold level u must be positive");
  const double level = an * u;
  const std::size_t k_n = sample.n / r_n;
  BlockCounts c;
  c.exceeded.reserve(k_n);
  c.exceedances.reserve(k_n);
  for (std::size_t k = 0; k < k_n; ++k) {
    std::size_t e = 0;
    for (std::size_t t = k * r_n; t < (k + 1) * r_n; ++t) {
      if (row_norm(sample.row(t)) > level) ++e;
    }
    c.exceeded.push_back(e > 0 ? 1.0 : 0.0);
    c.exceedances.push_back(static_cast<double>(e));
  }
  return c;
}

Estimate estimate_theta_blocks(const BlockCounts& counts) {
  const double e = std::accumulate(counts.exceedances.begin(), counts.exceedances.end(), 0.0);
  if (!(e > 0.0)) {
    throw EstimationError("blocks estimator: no exceedance in " +
                          std::to_string(counts.exceedances.size()) + " blocks");
  }
  const auto r = ratio_estimate(counts.exceeded, counts.exceedances);
  Estimate out;
  out.value = r.value;
  out.stderr_value = r.stderr_value;
  out.effective_count = static_cast<std::size_t>(
      std::accumulate(counts.exceeded.begin(), counts.exceeded.end(), 0.0));
  return out;
}

Estimate estimate_theta_blocks(const Sample& sample, double an, double u, std::size_t r_n) {
  return estimate_theta_blocks(count_blocks(sample, an, u, r_n));
}

// ---------------------------------------------------------------------------

std::vector<TailWindow> estimate_tail_process(const Sample& sample, double threshold,
                                              std::size_t m, std::size_t first_group) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  const std::size_t d = sample.dim;
  std::vector<TailWindow> out;
  std::size_t group = first_group;
  std::optional<std::size_t> last;
  for (std::size_t t = 0; t < sample.n; ++t) {
    const double norm = row_norm(sample.row(t));
    if (!(norm > threshold)) continue;
    if (last && t - *last > m) ++group;
    last = t;
    if (t < m || t + m >= sample.n) continue;
    TailWindow w;
    w.center_index = t;
    w.m = m;
    w.dim = d;
    w.group = group;
    w.norm_at_center = norm / threshold;
    w.values.assign(sample.values.begin() + static_cast<std::ptrdiff_t>((t - m) * d),
                    sample.values.begin() + static_cast<std::ptrdiff_t>((t + m + 1) * d));
    for (auto& v : w.values) v /= threshold;
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

std::vector<std::size_t> groups_of(std::span<const TailWindow> windows) {
  std::vector<std::size_t> g(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) g[i] = windows[i].group;
  return g;
}

}  // namespace

Estimate theta_from_spectral(std::span<const TailWindow> windows, double alpha) {
  if (windows.empty()) throw std::invalid_argument("spectral estimator needs at least one window");
  std::vector<double> terms(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto& w = windows[k];
    const double center = row_norm(w.at(0));
    double sup = 0.0;
    for (std::ptrdiff_t i = 1; i <= static_cast<std::ptrdiff_t>(w.m); ++i) {
      sup = std::max(sup, row_norm(w.at(i)) / center);
    }
    terms[k] = std::max(1.0 - std::pow(sup, alpha), 0.0);
  }
  Estimate e;
  e.value = mean(terms);
  const auto g = groups_of(windows);
  e.stderr_value = clustered_stderr(terms, g, e.value);
  e.effective_count = windows.size();
  return e;
}

namespace {

// Indicators of the nu^(u) event for each window, given a box test on the
// vector u sum_{i>=0} Y_i 1{|Y_i| > 1}.
template <class InBox>
NuPoint nu_from_windows(std::span<const TailWindow> windows, double alpha, double u,
                        InBox in_box) {
  if (!(u > 0.0)) throw std::invalid_argument("level u must be positive");
  if (windows.empty()) throw EstimationError("nu^(u) estimate: no tail windows");
  const std::size_t d = windows.front().dim;
  std::vector<double> ind(windows.size(), 0.0);
  std::size_t conditioned = 0;
  std::vector<double> sum(d);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto& w = windows[k];
    bool quiet_past = true;
    for (std::ptrdiff_t i = -static_cast<std::ptrdiff_t>(w.m); i < 0 && quiet_past; ++i) {
      quiet_past = row_norm(w.at(i)) <= 1.0;
    }
    if (!quiet_past) continue;
    ++conditioned;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::ptrdiff_t i = 0; i <= static_cast<std::ptrdiff_t>(w.m); ++i) {
      const auto y = w.at(i);
      for (std::size_t j = 0; j < d; ++j) {
        if (std::abs(y[j]) > 1.0) sum[j] += y[j];
      }
    }
    for (auto& s : sum) s *= u;
    if (in_box(sum)) ind[k] = 1.0;
  }
  if (conditioned == 0) {
    throw EstimationError("nu^(u) estimate: none of " + std::to_string(windows.size()) +
                          " windows has a quiet past");
  }
  const double scale = std::pow(u, -alpha);
  NuPoint p;
  const double f = mean(ind);
  p.value = scale * f;
  const auto g = groups_of(windows);
  if (auto se = clustered_stderr(ind, g, f)) p.stderr_value = scale * *se;
  return p;
}

}  // namespace

std::vector<NuPoint> nu_u_estimate(std::span<const TailWindow> windows, double alpha, double u,
                                   std::span<const double> x_grid) {
  if (!windows.empty() && windows.front().dim != 1) {
    throw std::invalid_argument("scalar nu^(u) tail needs scalar windows; use nu_u_box");
  }
  std::vector<NuPoint> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    auto p = nu_from_windows(windows, alpha, u,
                             [x](const std::vector<double>& s) { return s[0] > x; });
    p.x = x;
    out.push_back(p);
  }
  return out;
}

NuPoint nu_u_box(std::span<const TailWindow> windows, double alpha, double u,
                 std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box corners differ in size");
  if (!windows.empty() && windows.front().dim != lower.size()) {
    throw std::invalid_argument("box dimension differs from the windows");
  }
  return nu_from_windows(windows, alpha, u, [&](const std::vector<double>& s) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!(s[j] > lower[j] && s[j] <= upper[j])) return false;
    }
    return true;
  });
}

double nu_u_iid_closed_form(double alpha, double u, double x) {
  if (!(u > 0.0)) throw std::invalid_argument("level u must be positive");
  return x <= u ? std::pow(u, -alpha) : std::pow(x, -alpha);
}

SignCheck opposite_sign_check(std::span<const TailWindow> windows) {
  SignCheck c;
  if (windows.empty()) return c;
  const std::size_t d = windows.front().dim;
  c.coordinates.assign(d, true);
  for (const auto& w : windows) {
    ++c.windows_checked;
    bool failing = false;
    for (std::size_t j = 0; j < d; ++j) {
      bool pos = false;
      bool neg = false;
      for (std::size_t r = 0; r < 2 * w.m + 1; ++r) {
        const double v = w.values[r * d + j];
        pos = pos || v > 0.0;
        neg = neg || v < 0.0;
      }
      if (pos && neg) {
        c.coordinates[j] = false;
        failing = true;
      }
    }
    if (failing) ++c.windows_failing;
  }
  return c;
}

Estimate anticluster_statistic(const Sample& sample, double an, double u, std::size_t m,
                               std::size_t r_n) {
  if (m < 1 || m > r_n) throw std::invalid_argument("need 1 <= m <= r_n");
  const auto norms = row_norms(sample);
  const double level = an * u;
  const std::size_t n = sample.n;
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + (norms[t] > level ? 1 : 0);
  auto count = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) -> std::size_t {
    lo = std::max<std::ptrdiff_t>(lo, 0);
    hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(n) - 1);
    if (lo > hi) return 0;
    return prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
  };
  std::vector<double> ind;
  const auto mm = static_cast<std::ptrdiff_t>(m);
  const auto rr = static_cast<std::ptrdiff_t>(r_n);
  for (std::size_t t = 0; t < n; ++t) {
    if (!(norms[t] > level)) continue;
    const auto tt = static_cast<std::ptrdiff_t>(t);
    const bool hit = count(tt - rr, tt - mm) + count(tt + mm, tt + rr) > 0;
    ind.push_back(hit ? 1.0 : 0.0);
  }
  if (ind.empty()) throw EstimationError("anticluster statistic: no exceedances");
  Estimate e;
  e.value = mean(ind);
  e.stderr_value = standard_error(ind);
  e.effective_count = ind.size();
  return e;
}

// ---------------------------------------------------------------------------

double karamata_ratio(double alpha, double u, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Karamata ratio needs alpha in (0,1)");
  if (!(u > 0.0)) throw std::invalid_argument("level u must be positive");
  const double y = u * normalizing_an(alpha, n);
  if (y <= 1.0) return 0.0;
  return alpha / (1.0 - alpha) * (1.0 - std::pow(y, alpha - 1.0));
}

Estimate karamata_ratio_empirical(const Sample& sample, double alpha, double u) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Karamata ratio needs alpha in (0,1)");
  const double y = u * normalizing_an(alpha, sample.n);
  const auto norms = row_norms(sample);
  std::vector<double> num(norms.size());
  std::vector<double> den(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    num[i] = norms[i] <= y ? norms[i] / y : 0.0;
    den[i] = norms[i] > y ? 1.0 : 0.0;
  }
  const double tail = std::accumulate(den.begin(), den.end(), 0.0);
  if (!(tail > 0.0)) {
    throw EstimationError("empirical Karamata ratio: no value above u a_n in " +
                          std::to_string(norms.size()));
  }
  const auto r = ratio_estimate(num, den);
  Estimate e;
  e.value = r.value;
  e.stderr_value = r.stderr_value;
  e.effective_count = static_cast<std::size_t>(tail);
  return e;
}

}  // namespace cadlag
