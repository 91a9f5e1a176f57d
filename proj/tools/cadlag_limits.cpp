#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cadlag/experiments.hpp"
#include "cadlag/json_io.hpp"
#include "cadlag/limit_theorem.hpp"
#include "cadlag/metrics.hpp"
#include "cadlag/statistics.hpp"

using namespace cadlag;

namespace {

struct ModelOptions {
  std::string kind = "iid_pareto";
  double alpha = 1.5;
  std::size_t q = 1;
  std::size_t dim = 1;
  std::size_t n = 10000;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--model", kind, "iid_pareto | iid_symmetric_pareto | lagged | sre")
        ->capture_default_str();
    app->add_option("--alpha", alpha, "tail index in (0,2)")->capture_default_str();
    app->add_option("--q", q, "lag order of the lagged model")->capture_default_str();
    app->add_option("--dim", dim, "dimension of the SRE model")->capture_default_str();
    app->add_option("--n", n, "sample length")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->capture_default_str();
  }

  ModelConfig config() const {
    ModelConfig c;
    c.kind = parse_model_kind(kind);
    c.alpha = alpha;
    c.q = q;
    c.sre_dim = dim;
    c.n = n;
    c.seed = seed;
    c.validate();
    return c;
  }
};

// n^(1/alpha) for Pareto marginals, the empirical 1 - 1/n norm quantile else.
double sample_an(const Sample& s) {
  if (s.config.pareto_marginals()) return normalizing_an(s.config.alpha, s.n);
  return quantile(row_norms(s), 1.0 - 1.0 / static_cast<double>(s.n));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct EstimatorCsv {
  const Sample& sample;
  double u = 0.0;
  std::optional<std::size_t> r_n;

  static void header() { std::cout << "estimator,model,alpha,n,u,r_n,value,stderr\n"; }
  void row(const std::string& estimator, double value, std::optional<double> se) const {
    std::cout << estimator << ',' << sample.config.name() << ',' << num(sample.config.alpha) << ','
              << sample.n << ',' << num(u) << ',' << (r_n ? std::to_string(*r_n) : "NA") << ','
              << num(value) << ',' << (se ? num(*se) : "NA") << '\n';
  }
};

int run_distance(const std::string& metric, double tol, const std::vector<double>& c,
                 const std::string& a_path, const std::string& b_path) {
  const auto a = read_step_function(a_path);
  const auto b = read_step_function(b_path);
  nlohmann::json out{{"metric", metric}};
  if (metric == "uniform") {
    const double d = uniform_distance(a, b);
    out["value"] = d;
    out["lower_bound"] = d;
    out["upper_bound"] = d;
  } else if (metric == "strong-lb") {
    std::vector<double> coeff = c;
    if (coeff.empty()) coeff.assign(a.dim(), 1.0);
    const double lb = strong_m1_lower_bound(a, b, coeff, tol);
    out["value"] = lb;
    out["lower_bound"] = lb;
    out["upper_bound"] = nullptr;
  } else {
    const auto r = metric == "m1" ? m1_distance(a, b, tol) : weak_m1_distance(a, b, tol);
    out["value"] = r.value;
    out["lower_bound"] = r.lower_bound;
    out["upper_bound"] = r.upper_bound;
  }
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed partial sums, Skorohod M1 metrics and extremal clusters"};
  app.require_subcommand(1);

  // simulate
  ModelOptions sim_model;
  std::string sim_format = "csv";
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate a model and print the sample");
  sim_model.attach(simulate_cmd);
  simulate_cmd->add_option("--format", sim_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // distance
  std::string metric = "m1";
  double metric_tol = kDefaultMetricTol;
  std::vector<double> coeff;
  std::string path_a, path_b;
  auto* distance_cmd = app.add_subcommand("distance", "distance between two step functions");
  distance_cmd->add_option("--metric", metric, "m1 | wm1 | uniform | strong-lb")
      ->check(CLI::IsMember({"m1", "wm1", "uniform", "strong-lb"}))
      ->capture_default_str();
  distance_cmd->add_option("--tol", metric_tol, "bracket width")->capture_default_str();
  distance_cmd->add_option("--c", coeff, "coefficients for strong-lb (default all ones)");
  distance_cmd->add_option("a", path_a, "first path (JSON)")->required()->check(CLI::ExistingFile);
  distance_cmd->add_option("b", path_b, "second path (JSON)")->required()->check(CLI::ExistingFile);

  // estimators on one simulated sample
  ModelOptions est_model;
  double u = 1.0;
  std::optional<std::size_t> r_n;
  std::size_t m = 5;
  std::vector<double> x_grid{1.0, 2.0, 4.0};
  auto estimator = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    est_model.attach(cmd);
    cmd->add_option("--u", u, "threshold level relative to a_n")->capture_default_str();
    return cmd;
  };
  auto* theta_cmd = estimator("theta", "blocks and spectral extremal index");
  theta_cmd->add_option("--r-n", r_n, "block length (default floor(n^0.6))");
  theta_cmd->add_option("--m", m, "tail window half-width")->capture_default_str();
  auto* tailproc_cmd = estimator("tailproc", "mean spectral-process norms by lag");
  tailproc_cmd->add_option("--m", m, "tail window half-width")->capture_default_str();
  auto* nu_cmd = estimator("nu", "nu^(u)((x,inf)) from tail windows of a scalar model");
  nu_cmd->add_option("--m", m, "tail window half-width")->capture_default_str();
  nu_cmd->add_option("--x", x_grid, "evaluation points")->capture_default_str();
  double tail_prob = 1e-3;
  nu_cmd->add_option("--tail-prob", tail_prob, "exceedance probability of the window threshold")
      ->capture_default_str();
  auto* smalljump_cmd = estimator("smalljump", "centred small-jump maximal sum");
  auto* karamata_cmd = estimator("karamata", "truncated-moment ratio, closed form and empirical");

  // experiments
  std::string config_path;
  std::optional<std::string> out_dir;
  std::vector<CLI::App*> experiment_cmds;
  for (const char* name :
       {"convergence", "counterexample", "theta_study", "cluster_study", "diagnostics"}) {
    auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (default: config 'output')");
    experiment_cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate_cmd->parsed()) {
      const auto s = simulate(sim_model.config());
      if (sim_format == "json") {
        std::cout << to_json(s).dump() << '\n';
      } else {
        write_sample_csv(std::cout, s);
      }
      return 0;
    }
    if (distance_cmd->parsed()) return run_distance(metric, metric_tol, coeff, path_a, path_b);

    for (auto* cmd : experiment_cmds) {
      if (!cmd->parsed()) continue;
      auto config = read_experiment_config(config_path);
      if (parse_experiment_kind(cmd->get_name()) != config.experiment) {
        throw std::invalid_argument("config describes experiment " + to_string(config.experiment));
      }
      if (out_dir) config.output = *out_dir;
      const auto report = run_experiment(config);
      write_report(report, config.output);
      write_report_csv(std::cout, report);
      const auto overall = report.overall();
      std::cerr << "seed " << config.seed << ": " << to_string(overall) << '\n';
      return exit_code(overall);
    }

    const auto sample = simulate(est_model.config());
    const double an = sample_an(sample);
    EstimatorCsv csv{sample, u, std::nullopt};
    if (theta_cmd->parsed()) {
      const std::size_t block = r_n.value_or(default_block_length(sample.n));
      csv.r_n = block;
      EstimatorCsv::header();
      const auto blocks = estimate_theta_blocks(sample, an, u, block);
      csv.row("theta_blocks", blocks.value, blocks.stderr_value);
      const auto windows = estimate_tail_process(sample, an * u, m);
      if (windows.empty()) throw EstimationError("no tail windows above u a_n");
      const auto spectral = theta_from_spectral(windows, sample.config.alpha);
      csv.row("theta_spectral", spectral.value, spectral.stderr_value);
    } else if (tailproc_cmd->parsed()) {
      const auto windows = estimate_tail_process(sample, an * u, m);
      if (windows.empty()) throw EstimationError("no tail windows above u a_n");
      EstimatorCsv::header();
      csv.row("windows", static_cast<double>(windows.size()), std::nullopt);
      const auto mm = static_cast<std::ptrdiff_t>(m);
      for (std::ptrdiff_t i = -mm; i <= mm; ++i) {
        std::vector<double> norms;
        for (const auto& w : windows) norms.push_back(max_norm(w.at(i)) / w.norm_at_center);
        csv.row("mean_norm_theta[" + std::to_string(i) + "]", mean(norms), standard_error(norms));
      }
    } else if (nu_cmd->parsed()) {
      if (sample.dim != 1) throw std::invalid_argument("nu needs a scalar model");
      const double thr =
          sample.config.pareto_marginals()
              ? std::pow(tail_prob / marginal_tail_constant(sample.config), -1.0 / sample.config.alpha)
              : quantile(row_norms(sample), 1.0 - tail_prob);
      const auto windows = estimate_tail_process(sample, thr, m);
      EstimatorCsv::header();
      for (const auto& p : nu_u_estimate(windows, sample.config.alpha, u, x_grid)) {
        csv.row("nu_u(x=" + num(p.x) + ")", p.value, p.stderr_value);
      }
    } else if (smalljump_cmd->parsed()) {
      EstimatorCsv::header();
      csv.row("small_jump", small_jump_statistic(sample, sample.config.alpha, u), std::nullopt);
    } else if (karamata_cmd->parsed()) {
      EstimatorCsv::header();
      csv.row("karamata_closed_form", karamata_ratio(sample.config.alpha, u, sample.n),
              std::nullopt);
      const auto e = karamata_ratio_empirical(sample, sample.config.alpha, u);
      csv.row("karamata_empirical", e.value, e.stderr_value);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
