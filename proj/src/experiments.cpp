#include "cadlag/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cadlag/json_io.hpp"
#include "cadlag/limit_theorem.hpp"
#include "cadlag/metrics.hpp"
#include "cadlag/parallel.hpp"
#include "cadlag/random.hpp"
#include "cadlag/stable.hpp"
#include "cadlag/statistics.hpp"

namespace cadlag {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags keep auxiliary draws disjoint from replication streams.
constexpr std::uint64_t kPilotTag = 0x70696c6f74ULL;
constexpr std::uint64_t kFrechetTag = 0x66726563ULL;
constexpr std::size_t kPilotReplications = 20;
constexpr double kPilotExceedances = 1000.0;

std::uint64_t replication_seed(const ExperimentConfig& c, std::size_t ni, std::size_t r) {
  return stream_seed(stream_seed(c.seed, ni), r);
}

Sample replicate(const ExperimentConfig& c, std::size_t ni, std::size_t n, std::size_t r) {
  ModelConfig m = c.model;
  m.n = n;
  m.seed = replication_seed(c, ni, r);
  return simulate(m);
}

// Pooled norms of independent pilot runs of the model.
std::vector<double> pilot_norms(const ExperimentConfig& c, std::size_t ni, std::size_t n) {
  auto runs = parallel_map(kPilotReplications, [&](std::size_t k) {
    ModelConfig m = c.model;
    m.n = n;
    m.seed = stream_seed(stream_seed(c.seed ^ kPilotTag, ni), k);
    return row_norms(simulate(m));
  });
  std::vector<double> all;
  for (const auto& r : runs) all.insert(all.end(), r.begin(), r.end());
  return all;
}

// Level x with P(||X|| > x) = p from pooled pilot norms. Extreme levels are
// dominated by a few long clusters, so the quantile is taken where the pilot
// holds kPilotExceedances values and extrapolated with the tail index.
double pilot_tail_level(const ExperimentConfig& c, std::size_t ni, std::size_t n, double p) {
  const auto norms = pilot_norms(c, ni, n);
  const double p0 = std::max(p, kPilotExceedances / static_cast<double>(norms.size()));
  return quantile(norms, 1.0 - p0) * std::pow(p0 / p, 1.0 / c.model.alpha);
}

// a_n with n P(||X|| > a_n) = 1: n^(1/alpha) for the Pareto models (the
// lagged model keeps the marginal normalisation), pilot runs otherwise.
double normalizer(const ExperimentConfig& c, std::size_t ni, std::size_t n) {
  if (c.model.pareto_marginals()) return normalizing_an(c.model.alpha, n);
  return pilot_tail_level(c, ni, n, 1.0 / static_cast<double>(n));
}

// n P(||X|| > a_n u) -> C u^-alpha; C = 1 by construction for the SRE.
double tail_constant(const ModelConfig& m) {
  return m.pareto_marginals() ? marginal_tail_constant(m) : 1.0;
}

// Level x with P(||X|| > x) = p.
double tail_threshold(const ExperimentConfig& c, std::size_t ni, std::size_t n, double p) {
  if (c.model.pareto_marginals()) {
    return std::pow(p / marginal_tail_constant(c.model), -1.0 / c.model.alpha);
  }
  return pilot_tail_level(c, ni, n, p);
}

std::size_t block_length(const ExperimentConfig& c, std::size_t n) {
  return std::min(n, c.block_length.value_or(default_block_length(n)));
}

struct Rows {
  Report& report;
  const ExperimentConfig& config;

  ReportRow make(std::size_t n, std::string statistic, double value,
                 std::optional<double> se = std::nullopt) const {
    ReportRow r;
    r.experiment = to_string(config.experiment);
    r.model = config.model.name();
    r.alpha = config.model.alpha;
    r.n = n;
    r.statistic = std::move(statistic);
    r.value = value;
    r.stderr_value = se;
    return r;
  }
  void info(std::size_t n, std::string statistic, double value,
            std::optional<double> se = std::nullopt) const {
    report.add(make(n, std::move(statistic), value, se));
  }
  void criterion(std::string id, Status status, std::size_t n, std::string statistic, double value,
                 std::optional<double> se = std::nullopt) const {
    auto r = make(n, std::move(statistic), value, se);
    r.criterion = std::move(id);
    r.status = status;
    report.add_criterion(std::move(r));
  }
};

Status verdict(bool ok) { return ok ? Status::pass : Status::fail; }

std::string level_suffix(double u) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "[u=%g]", u);
  return buf;
}

Report start(const ExperimentConfig& c) {
  c.validate();
  Report r;
  r.experiment = to_string(c.experiment);
  r.metadata["seed"] = c.seed;
  r.metadata["version"] = kVersion;
  r.metadata["config"] = to_json(c);
  return r;
}

PlotData ecdf_plot(std::string name, std::vector<double> xs,
                   const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  PlotData p{std::move(name), {"x", "empirical", "reference"}, {}};
  const double k = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p.rows.push_back({xs[i], static_cast<double>(i + 1) / k, cdf(xs[i])});
  }
  return p;
}

// ---------------------------------------------------------------------------

Report convergence(const ExperimentConfig& c) {
  Report report = start(c);
  Rows rows{report, c};
  const auto limit = stable_limit_params(c.model.alpha, c.model);
  ModelConfig iid;
  iid.kind = ModelKind::iid_pareto;
  const auto coordinate_limit = stable_limit_params(c.model.alpha, iid);
  const std::size_t d = c.model.dim();
  const bool enough = c.replications >= c.tol.min_replications;
  report.metadata["limit"] = {{"alpha", limit.alpha},
                              {"skew", limit.skew},
                              {"scale", limit.scale},
                              {"location", limit.location}};
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const std::size_t n = c.n_grid[ni];
    const auto finals = parallel_map(c.replications, [&](std::size_t r) {
      const auto v = partial_sum_process(replicate(c, ni, n, r), c.model.alpha);
      const auto end = v.terminal_value();
      return std::vector<double>(end.begin(), end.end());
    });
    std::vector<double> total(c.replications, 0.0);
    for (std::size_t r = 0; r < c.replications; ++r) {
      for (double x : finals[r]) total[r] += x;
    }
    const auto cdf = [&](double x) { return stable_cdf(limit, x); };
    rows.info(n, "mean V_n(1)", mean(total), standard_error(total));
    rows.info(n, "median V_n(1)", median(total), median_standard_error(total));
    const double ks = ks_statistic(total, cdf);
    if (ni + 1 == c.n_grid.size()) {
      rows.criterion("AC3", enough ? verdict(ks < c.tol.ks) : Status::inconclusive, n,
                     "ks V_n(1) vs stable", ks);
    } else {
      rows.info(n, "ks V_n(1) vs stable", ks);
    }
    if (c.model.kind == ModelKind::lagged) {
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> coord(c.replications);
        for (std::size_t r = 0; r < c.replications; ++r) coord[r] = finals[r][j];
        rows.info(n, "ks V_n^" + std::to_string(j + 1) + "(1) vs stable",
                  ks_statistic(coord, [&](double x) { return stable_cdf(coordinate_limit, x); }));
      }
    }
    report.plots.push_back(ecdf_plot("ecdf_V1_n" + std::to_string(n), total, cdf));
  }
  return report;
}

// ---------------------------------------------------------------------------

struct CounterexampleRep {
  double gap_quarter = 0.0;
  double gap_half = 0.0;
  double gap_three_quarters = 0.0;
  double sup = 0.0;
  double strong_lb = 0.0;
  std::optional<MetricResult> dp;
};

// (x^1, x^1) from a two-dimensional path.
StepFunction first_coordinate_twice(const StepFunction& v) {
  const auto first = project(v, 0);
  std::vector<double> values;
  values.reserve(2 * first.jump_count());
  for (double x : first.jump_values()) {
    values.push_back(x);
    values.push_back(x);
  }
  const double x0 = first.initial_value()[0];
  const auto times = first.jump_times();
  return StepFunction({x0, x0}, std::vector<double>(times.begin(), times.end()),
                      std::move(values));
}

Report counterexample(const ExperimentConfig& c) {
  if (c.model.kind != ModelKind::lagged || c.model.q != 1) {
    throw std::invalid_argument("counterexample needs the lagged model with q = 1");
  }
  Report report = start(c);
  Rows rows{report, c};
  const double alpha = c.model.alpha;
  const std::vector<double> contrast{1.0, -1.0};
  const bool enough = c.replications >= c.tol.min_replications;

  // Independent Frechet(alpha) sample by inversion.
  std::vector<double> frechet(c.replications);
  {
    Stream s(stream_seed(c.seed, kFrechetTag));
    for (auto& x : frechet) x = std::pow(-std::log(s.uniform_open()), -1.0 / alpha);
  }
  const double frechet_median = median(frechet);
  rows.info(0, "frechet sample median", frechet_median, median_standard_error(frechet));

  struct PerN {
    double lb_median = 0.0;
    std::optional<double> lb_se;
    double dp_upper_median = kNaN;
    double dp_lower_median = kNaN;
  };
  std::vector<PerN> per_n;
  bool fidi_ok = false;
  bool sup_ok = false;
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const std::size_t n = c.n_grid[ni];
    const auto reps = parallel_map(c.replications, [&](std::size_t r) {
      const auto v = partial_sum_process(replicate(c, ni, n, r), alpha);
      CounterexampleRep out;
      auto gap = [&](double t) {
        const auto x = eval(v, t);
        return std::abs(x[0] - x[1]);
      };
      out.gap_quarter = gap(0.25);
      out.gap_half = gap(0.5);
      out.gap_three_quarters = gap(0.75);
      const auto diff = linear_combination(v, contrast);
      out.sup = diff.initial_value()[0];
      for (double x : diff.jump_values()) out.sup = std::max(out.sup, x);
      const auto hat = first_coordinate_twice(v);
      out.strong_lb = strong_m1_lower_bound(v, hat, contrast, c.tol.metric_tol);
      if (r < c.dp_replications) out.dp = weak_m1_distance(v, hat, c.tol.metric_tol * 1e-2);
      return out;
    });
    std::vector<double> q1, q2, q3, sup, lb, dp_upper, dp_lower;
    for (const auto& r : reps) {
      q1.push_back(r.gap_quarter);
      q2.push_back(r.gap_half);
      q3.push_back(r.gap_three_quarters);
      sup.push_back(r.sup);
      lb.push_back(r.strong_lb);
      if (r.dp) {
        dp_upper.push_back(r.dp->upper_bound);
        dp_lower.push_back(r.dp->lower_bound);
      }
    }
    const bool last = ni + 1 == c.n_grid.size();
    rows.info(n, "median |V^1-V^2|(0.25)", median(q1), median_standard_error(q1));
    rows.info(n, "median |V^1-V^2|(0.75)", median(q3), median_standard_error(q3));
    const double fidi = median(q2);
    const double sup_ks = ks_statistic(sup, [&](double x) { return frechet_cdf(alpha, x); });
    if (last) {
      fidi_ok = fidi < c.tol.fidi;
      sup_ok = enough && sup_ks < c.tol.sup_ks;
      rows.criterion("AC9a", verdict(fidi_ok), n, "median |V^1-V^2|(0.5)", fidi,
                     median_standard_error(q2));
      rows.criterion("AC9b", enough ? verdict(sup_ok) : Status::inconclusive, n,
                     "ks sup(V^1-V^2) vs frechet", sup_ks);
      report.plots.push_back(ecdf_plot("ecdf_sup_n" + std::to_string(n), sup,
                                       [&](double x) { return frechet_cdf(alpha, x); }));
    } else {
      rows.info(n, "median |V^1-V^2|(0.5)", fidi, median_standard_error(q2));
      rows.info(n, "ks sup(V^1-V^2) vs frechet", sup_ks);
    }
    rows.info(n, "median sup(V^1-V^2)", median(sup), median_standard_error(sup));
    PerN p;
    p.lb_median = median(lb);
    p.lb_se = median_standard_error(lb);
    if (!dp_upper.empty()) {
      p.dp_upper_median = median(dp_upper);
      p.dp_lower_median = median(dp_lower);
    }
    if (!last) rows.info(n, "median strong M1 lower bound", p.lb_median, p.lb_se);
    rows.info(n, "median d_p upper bound", p.dp_upper_median);
    rows.info(n, "median d_p lower bound", p.dp_lower_median);
    per_n.push_back(p);
  }

  const auto& first = per_n.front();
  const auto& final = per_n.back();
  const std::size_t n_last = c.n_grid.back();
  Status lb_status = Status::inconclusive;
  bool bounded_below = final.lb_median >= c.tol.strong_lb_ratio * frechet_median;
  if (per_n.size() >= 2 && enough && first.lb_se && final.lb_se) {
    const double slack = c.tol.joint_se * std::hypot(*first.lb_se, *final.lb_se);
    const bool not_decreasing = final.lb_median >= first.lb_median - slack;
    // d_p must shrink: upper bracket at the largest n below the lower
    // bracket at the smallest n.
    const bool dp_shrinks = final.dp_upper_median < first.dp_lower_median;
    rows.info(n_last, "strong M1 lower bound not decreasing", not_decreasing ? 1.0 : 0.0);
    rows.info(n_last, "strong M1 lower bound / frechet median", final.lb_median / frechet_median);
    rows.info(n_last, "d_p decreasing", dp_shrinks ? 1.0 : 0.0);
    lb_status = verdict(not_decreasing && bounded_below && dp_shrinks);
  }
  rows.criterion("AC9c", lb_status, n_last, "median strong M1 lower bound", final.lb_median,
                 final.lb_se);
  const bool coherent = fidi_ok && sup_ok && lb_status == Status::pass;
  report.metadata["coherent"] = coherent;
  rows.info(n_last, "coherent", coherent ? 1.0 : 0.0);

  PlotData trend{"strong_lb_by_n", {"n", "median_strong_lb", "median_dp_upper"}, {}};
  for (std::size_t ni = 0; ni < per_n.size(); ++ni) {
    trend.rows.push_back({static_cast<double>(c.n_grid[ni]), per_n[ni].lb_median,
                          per_n[ni].dp_upper_median});
  }
  report.plots.push_back(std::move(trend));
  return report;
}

// ---------------------------------------------------------------------------

Report theta_study(const ExperimentConfig& c) {
  Report report = start(c);
  Rows rows{report, c};
  auto levels = c.u_grid;
  if (std::find(levels.begin(), levels.end(), c.criterion_u) == levels.end()) {
    levels.push_back(c.criterion_u);
  }
  const auto known = known_extremal_index(c.model);
  PlotData plot{"theta", {"n", "u", "blocks", "blocks_se", "spectral", "spectral_se"}, {}};
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const std::size_t n = c.n_grid[ni];
    const double an = normalizer(c, ni, n);
    const std::size_t r_n = block_length(c, n);
    struct PerLevel {
      BlockCounts counts;
      std::vector<TailWindow> windows;
    };
    const auto reps = parallel_map(c.replications, [&](std::size_t r) {
      const auto s = replicate(c, ni, n, r);
      std::vector<PerLevel> out;
      for (double u : levels) {
        out.push_back({count_blocks(s, an, u, r_n),
                       estimate_tail_process(s, an * u, c.window_m, r * (n + 1))});
      }
      return out;
    });
    rows.info(n, "a_n", an);
    rows.info(n, "r_n", static_cast<double>(r_n));
    const bool last = ni + 1 == c.n_grid.size();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double u = levels[k];
      BlockCounts counts;
      std::vector<TailWindow> windows;
      for (const auto& rep : reps) {
        counts.append(rep[k].counts);
        windows.insert(windows.end(), rep[k].windows.begin(), rep[k].windows.end());
      }
      std::optional<Estimate> blocks;
      std::optional<Estimate> spectral;
      try {
        blocks = estimate_theta_blocks(counts);
      } catch (const EstimationError&) {
      }
      if (!windows.empty()) spectral = theta_from_spectral(windows, c.model.alpha);
      const std::string sfx = level_suffix(u);
      const bool scored = last && u == c.criterion_u;
      if (known && scored) {
        const Status s = blocks ? verdict(std::abs(blocks->value - *known) <= c.tol.theta)
                                : Status::inconclusive;
        rows.criterion("AC4a", s, n, "theta blocks" + sfx, blocks ? blocks->value : kNaN,
                       blocks ? blocks->stderr_value : std::nullopt);
      } else {
        rows.info(n, "theta blocks" + sfx, blocks ? blocks->value : kNaN,
                  blocks ? blocks->stderr_value : std::nullopt);
      }
      rows.info(n, "theta spectral" + sfx, spectral ? spectral->value : kNaN,
                spectral ? spectral->stderr_value : std::nullopt);
      rows.info(n, "tail windows" + sfx, static_cast<double>(windows.size()));
      std::optional<double> joint;
      if (blocks && spectral && blocks->stderr_value && spectral->stderr_value) {
        joint = std::hypot(*blocks->stderr_value, *spectral->stderr_value);
      }
      const double gap = blocks && spectral ? std::abs(blocks->value - spectral->value) : kNaN;
      if (scored) {
        const Status s = joint ? verdict(gap <= c.tol.joint_se * *joint) : Status::inconclusive;
        rows.criterion("AC4b", s, n, "|theta blocks - theta spectral|" + sfx, gap, joint);
      } else {
        rows.info(n, "|theta blocks - theta spectral|" + sfx, gap, joint);
      }
      plot.rows.push_back({static_cast<double>(n), u, blocks ? blocks->value : kNaN,
                           blocks && blocks->stderr_value ? *blocks->stderr_value : kNaN,
                           spectral ? spectral->value : kNaN,
                           spectral && spectral->stderr_value ? *spectral->stderr_value : kNaN});
    }
  }
  report.plots.push_back(std::move(plot));
  return report;
}

// ---------------------------------------------------------------------------

Report cluster_study(const ExperimentConfig& c) {
  Report report = start(c);
  Rows rows{report, c};
  const double u = c.criterion_u;
  const auto known = known_extremal_index(c.model);
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const std::size_t n = c.n_grid[ni];
    const double an = normalizer(c, ni, n);
    const std::size_t r_n = block_length(c, n);
    struct RepClusters {
      std::vector<std::size_t> sizes;
      std::vector<std::size_t> starts;
    };
    const auto reps = parallel_map(c.replications, [&](std::size_t r) {
      RepClusters out;
      for (const auto& cl : extract_clusters(replicate(c, ni, n, r), an, u, r_n)) {
        out.sizes.push_back(cl.exceedances());
        out.starts.push_back(cl.first_exceedance);
      }
      return out;
    });
    // Replication r occupies [r, r + 1) of one time axis.
    std::vector<double> times;
    std::vector<double> sizes;
    std::vector<double> per_rep;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      for (std::size_t i = 0; i < reps[r].sizes.size(); ++i) {
        sizes.push_back(static_cast<double>(reps[r].sizes[i]));
        times.push_back(static_cast<double>(r) +
                        static_cast<double>(reps[r].starts[i] + 1) / static_cast<double>(n));
      }
      per_rep.push_back(static_cast<double>(reps[r].sizes.size()));
    }
    const std::size_t clusters = sizes.size();
    const bool enough = clusters >= c.tol.min_clusters;
    double exceedances = 0.0;
    for (double s : sizes) exceedances += s;
    const double theta = known ? *known : (exceedances > 0.0 ? clusters / exceedances : kNaN);
    const double rate = theta * tail_constant(c.model) * std::pow(u, -c.model.alpha);
    rows.info(n, "clusters", static_cast<double>(clusters));
    rows.info(n, "clusters per replication", mean(per_rep), standard_error(per_rep));
    rows.info(n, "poisson mean theta C u^-alpha", rate);
    if (per_rep.size() >= 2 && mean(per_rep) > 0.0) {
      const double se = standard_error(per_rep).value_or(0.0);
      const double var = se * se * static_cast<double>(per_rep.size());
      rows.info(n, "cluster count dispersion", var / mean(per_rep));
    }
    std::size_t max_size = 0;
    for (double s : sizes) max_size = std::max(max_size, static_cast<std::size_t>(s));
    PlotData hist{"cluster_sizes_n" + std::to_string(n), {"size", "count", "fraction"}, {}};
    auto fraction = [&](std::size_t k) {
      if (clusters == 0) return kNaN;
      return static_cast<double>(std::count(sizes.begin(), sizes.end(), static_cast<double>(k))) /
             static_cast<double>(clusters);
    };
    for (std::size_t k = 1; k <= max_size; ++k) {
      const double f = fraction(k);
      hist.rows.push_back({static_cast<double>(k), f * static_cast<double>(clusters), f});
    }
    report.plots.push_back(std::move(hist));
    const bool last = ni + 1 == c.n_grid.size();

    std::size_t target = 0;
    double mass_tol = 0.0;
    if (c.model.kind == ModelKind::lagged) {
      target = c.model.q + 1;
      mass_tol = c.tol.cluster_mass_lagged;
    } else if (c.model.kind != ModelKind::sre) {
      target = 1;
      mass_tol = c.tol.cluster_mass_iid;
    }
    if (target > 0) {
      const std::string stat = "fraction of clusters of size " + std::to_string(target);
      const double f = fraction(target);
      if (last) {
        rows.criterion("AC5", enough ? verdict(f > mass_tol) : Status::inconclusive, n, stat, f);
      } else {
        rows.info(n, stat, f);
      }
    }
    for (std::size_t k = 1; k <= std::min<std::size_t>(max_size, 4); ++k) {
      if (k != target) rows.info(n, "fraction of clusters of size " + std::to_string(k), fraction(k));
    }

    std::vector<double> gaps;
    for (std::size_t i = 1; i < times.size(); ++i) gaps.push_back(times[i] - times[i - 1]);
    const double gap_ks =
        gaps.empty() ? kNaN : ks_statistic(gaps, [&](double x) { return exponential_cdf(rate, x); });
    if (last && known) {
      rows.criterion("AC6", enough ? verdict(gap_ks < c.tol.gap_ks) : Status::inconclusive, n,
                     "ks inter-cluster gaps vs exponential", gap_ks);
    } else {
      rows.info(n, "ks inter-cluster gaps vs exponential", gap_ks);
    }
    if (!gaps.empty()) {
      report.plots.push_back(ecdf_plot("ecdf_gaps_n" + std::to_string(n), gaps,
                                       [&](double x) { return exponential_cdf(rate, x); }));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

Report diagnostics(const ExperimentConfig& c) {
  Report report = start(c);
  Rows rows{report, c};
  const double alpha = c.model.alpha;
  const double u = c.criterion_u;
  std::vector<double> small_levels;
  for (double v : c.u_grid) {
    if (v > 0.0 && v <= 1.0) small_levels.push_back(v);
  }
  std::sort(small_levels.begin(), small_levels.end());
  const bool small_jumps = c.model.pareto_marginals();
  const bool karamata_empirical = alpha < 1.0 && c.model.pareto_marginals() && c.model.nonnegative();
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const std::size_t n = c.n_grid[ni];
    const double an = normalizer(c, ni, n);
    const std::size_t r_n = block_length(c, n);
    const double thr = tail_threshold(c, ni, n, c.tail_prob);
    struct RepDiag {
      std::vector<double> anti_hits, anti_count;
      std::vector<double> small;
      std::optional<double> karamata;
      std::vector<TailWindow> windows;
    };
    const auto reps = parallel_map(c.replications, [&](std::size_t r) {
      const auto s = replicate(c, ni, n, r);
      RepDiag out;
      for (std::size_t m : c.m_grid) {
        double hits = 0.0;
        double count = 0.0;
        if (m >= 1 && m <= r_n) {
          try {
            const auto e = anticluster_statistic(s, an, u, m, r_n);
            count = static_cast<double>(e.effective_count);
            hits = e.value * count;
          } catch (const EstimationError&) {
          }
        }
        out.anti_hits.push_back(hits);
        out.anti_count.push_back(count);
      }
      if (small_jumps) {
        for (double v : small_levels) out.small.push_back(small_jump_statistic(s, alpha, v));
      }
      if (karamata_empirical) {
        try {
          out.karamata = karamata_ratio_empirical(s, alpha, u).value;
        } catch (const EstimationError&) {
        }
      }
      out.windows = estimate_tail_process(s, thr, c.window_m, r * (n + 1));
      return out;
    });
    const bool last = ni + 1 == c.n_grid.size();

    for (std::size_t k = 0; k < c.m_grid.size(); ++k) {
      std::vector<double> hits, count;
      for (const auto& r : reps) {
        hits.push_back(r.anti_hits[k]);
        count.push_back(r.anti_count[k]);
      }
      const std::string stat = "anticluster m=" + std::to_string(c.m_grid[k]);
      double total = 0.0;
      for (double x : count) total += x;
      if (total > 0.0) {
        const auto e = ratio_estimate(hits, count);
        rows.info(n, stat, e.value, e.stderr_value);
      } else {
        rows.info(n, stat, kNaN);
      }
    }

    if (small_jumps) {
      std::vector<double> medians;
      for (std::size_t k = 0; k < small_levels.size(); ++k) {
        std::vector<double> v;
        for (const auto& r : reps) v.push_back(r.small[k]);
        medians.push_back(median(v));
        rows.info(n, "median small-jump statistic" + level_suffix(small_levels[k]), medians.back(),
                  median_standard_error(v));
      }
      if (medians.size() >= 2) {
        bool increasing = true;
        for (std::size_t k = 1; k < medians.size(); ++k) increasing &= medians[k] > medians[k - 1];
        rows.info(n, "small-jump median increasing in u", increasing ? 1.0 : 0.0);
      }
    }

    if (alpha < 1.0) {
      const double ratio = karamata_ratio(alpha, u, n);
      const double limit = alpha / (1.0 - alpha);
      if (last) {
        rows.criterion("AC8", verdict(std::abs(ratio - limit) <= c.tol.karamata), n,
                       "karamata ratio" + level_suffix(u), ratio);
      } else {
        rows.info(n, "karamata ratio" + level_suffix(u), ratio);
      }
      if (karamata_empirical) {
        std::vector<double> emp;
        for (const auto& r : reps) {
          if (r.karamata) emp.push_back(*r.karamata);
        }
        if (!emp.empty()) {
          rows.info(n, "karamata ratio empirical" + level_suffix(u), mean(emp), standard_error(emp));
        }
      }
    }

    std::vector<TailWindow> windows;
    for (const auto& r : reps) windows.insert(windows.end(), r.windows.begin(), r.windows.end());
    rows.info(n, "tail windows", static_cast<double>(windows.size()));

    if (c.model.kind == ModelKind::iid_pareto) {
      std::vector<double> grid;
      for (double f : c.nu_factors) grid.push_back(f * u);
      std::optional<std::vector<NuPoint>> nu;
      try {
        nu = nu_u_estimate(windows, alpha, u, grid);
      } catch (const EstimationError&) {
      }
      double worst = nu ? 0.0 : kNaN;
      PlotData plot{"nu_u_n" + std::to_string(n), {"x", "estimate", "stderr", "closed_form"}, {}};
      if (nu) {
        for (const auto& p : *nu) {
          const double exact = nu_u_iid_closed_form(alpha, u, p.x);
          worst = std::max(worst, std::abs(p.value / exact - 1.0));
          char name[64];
          std::snprintf(name, sizeof name, "nu^(u)((%g,inf))", p.x);
          rows.info(n, name, p.value, p.stderr_value);
          plot.rows.push_back({p.x, p.value, p.stderr_value.value_or(kNaN), exact});
        }
      }
      report.plots.push_back(std::move(plot));
      if (last) {
        rows.criterion("AC7", nu ? verdict(worst <= c.tol.nu_relative) : Status::inconclusive, n,
                       "max relative error nu^(u) vs closed form", worst);
      } else {
        rows.info(n, "max relative error nu^(u) vs closed form", worst);
      }
    }

    const auto sign = opposite_sign_check(windows);
    const double failing = sign.windows_checked == 0
                               ? kNaN
                               : static_cast<double>(sign.windows_failing) /
                                     static_cast<double>(sign.windows_checked);
    if (last && c.model.nonnegative()) {
      rows.criterion("AC11",
                     sign.windows_checked == 0 ? Status::inconclusive : verdict(sign.passed()), n,
                     "fraction of windows with opposite signs", failing);
    } else {
      rows.info(n, "fraction of windows with opposite signs", failing);
    }
  }
  return report;
}

template <class Fn>
Report timed(const ExperimentConfig& c, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r = fn(c);
  r.metadata["threads"] = thread_count();
  r.metadata["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "convergence") return ExperimentKind::convergence;
  if (name == "counterexample") return ExperimentKind::counterexample;
  if (name == "theta_study") return ExperimentKind::theta_study;
  if (name == "cluster_study") return ExperimentKind::cluster_study;
  if (name == "diagnostics") return ExperimentKind::diagnostics;
  throw std::invalid_argument("unknown experiment " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::convergence:
      return "convergence";
    case ExperimentKind::counterexample:
      return "counterexample";
    case ExperimentKind::theta_study:
      return "theta_study";
    case ExperimentKind::cluster_study:
      return "cluster_study";
    case ExperimentKind::diagnostics:
      return "diagnostics";
  }
  return "convergence";
}

void ExperimentConfig::validate() const {
  model.validate();
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw std::invalid_argument("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("n_grid must be strictly ascending");
    }
  }
  if (!(criterion_u > 0.0)) throw std::invalid_argument("criterion_u must be positive");
  for (double u : u_grid) {
    if (!(u > 0.0)) throw std::invalid_argument("u_grid entries must be positive");
  }
  if (!(tail_prob > 0.0 && tail_prob < 1.0)) {
    throw std::invalid_argument("tail_prob must lie in (0,1)");
  }
  if (block_length && *block_length < 1) throw std::invalid_argument("block_length must be >= 1");
  if (!(tol.metric_tol > 0.0)) throw std::invalid_argument("metric_tol must be positive");
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
    if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
    c.replications = j.value("replications", c.replications);
    c.n_grid = j.value("n_grid", c.n_grid);
    c.u_grid = j.value("u_grid", c.u_grid);
    c.criterion_u = j.value("criterion_u", c.criterion_u);
    c.m_grid = j.value("m_grid", c.m_grid);
    c.window_m = j.value("window_m", c.window_m);
    c.tail_prob = j.value("tail_prob", c.tail_prob);
    if (j.contains("block_length") && !j.at("block_length").is_null()) {
      c.block_length = j.at("block_length").get<std::size_t>();
    }
    c.dp_replications = j.value("dp_replications", c.dp_replications);
    c.nu_factors = j.value("nu_factors", c.nu_factors);
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", c.output);
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      auto& tol = c.tol;
      tol.ks = t.value("ks", tol.ks);
      tol.theta = t.value("theta", tol.theta);
      tol.joint_se = t.value("joint_se", tol.joint_se);
      tol.cluster_mass_lagged = t.value("cluster_mass_lagged", tol.cluster_mass_lagged);
      tol.cluster_mass_iid = t.value("cluster_mass_iid", tol.cluster_mass_iid);
      tol.gap_ks = t.value("gap_ks", tol.gap_ks);
      tol.nu_relative = t.value("nu_relative", tol.nu_relative);
      tol.karamata = t.value("karamata", tol.karamata);
      tol.fidi = t.value("fidi", tol.fidi);
      tol.sup_ks = t.value("sup_ks", tol.sup_ks);
      tol.strong_lb_ratio = t.value("strong_lb_ratio", tol.strong_lb_ratio);
      tol.metric_tol = t.value("metric_tol", tol.metric_tol);
      tol.min_clusters = t.value("min_clusters", tol.min_clusters);
      tol.min_replications = t.value("min_replications", tol.min_replications);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& t = c.tol;
  return {{"experiment", to_string(c.experiment)},
          {"model", to_json(c.model)},
          {"replications", c.replications},
          {"n_grid", c.n_grid},
          {"u_grid", c.u_grid},
          {"criterion_u", c.criterion_u},
          {"m_grid", c.m_grid},
          {"window_m", c.window_m},
          {"tail_prob", c.tail_prob},
          {"block_length", c.block_length ? json(*c.block_length) : json(nullptr)},
          {"dp_replications", c.dp_replications},
          {"nu_factors", c.nu_factors},
          {"seed", c.seed},
          {"output", c.output},
          {"tolerances",
           {{"ks", t.ks},
            {"theta", t.theta},
            {"joint_se", t.joint_se},
            {"cluster_mass_lagged", t.cluster_mass_lagged},
            {"cluster_mass_iid", t.cluster_mass_iid},
            {"gap_ks", t.gap_ks},
            {"nu_relative", t.nu_relative},
            {"karamata", t.karamata},
            {"fidi", t.fidi},
            {"sup_ks", t.sup_ks},
            {"strong_lb_ratio", t.strong_lb_ratio},
            {"metric_tol", t.metric_tol},
            {"min_clusters", t.min_clusters},
            {"min_replications", t.min_replications}}}};
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

Report run_convergence(const ExperimentConfig& config) { return timed(config, convergence); }
Report run_counterexample(const ExperimentConfig& config) { return timed(config, counterexample); }
Report run_theta_study(const ExperimentConfig& config) { return timed(config, theta_study); }
Report run_cluster_study(const ExperimentConfig& config) { return timed(config, cluster_study); }
Report run_diagnostics(const ExperimentConfig& config) { return timed(config, diagnostics); }

Report run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::convergence:
      return run_convergence(config);
    case ExperimentKind::counterexample:
      return run_counterexample(config);
    case ExperimentKind::theta_study:
      return run_theta_study(config);
    case ExperimentKind::cluster_study:
      return run_cluster_study(config);
    case ExperimentKind::diagnostics:
      return run_diagnostics(config);
  }
  throw std::invalid_argument("unknown experiment");
}

}  // namespace cadlag
