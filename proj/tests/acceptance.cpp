// Acceptance gate: one line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cadlag/experiments.hpp"
#include "cadlag/limit_theorem.hpp"
#include "cadlag/metrics.hpp"

using namespace cadlag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const fs::path kConfigDir = CADLAG_CONFIG_DIR;
const fs::path kOutDir = fs::current_path() / "acceptance_out";

ExperimentConfig load(const std::string& name) {
  auto c = read_experiment_config((kConfigDir / (name + ".json")).string());
  c.output = (kOutDir / name).string();
  return c;
}

struct Run {
  Report report;
  double seconds = 0.0;
};

Run run(const std::string& name) {
  const auto c = load(name);
  const auto t0 = std::chrono::steady_clock::now();
  Run r{run_experiment(c), 0.0};
  r.seconds = seconds_since(t0);
  write_report(r.report, c.output);
  return r;
}

// Pass iff every listed criterion row passes; detail lists the values.
Outcome rows_pass(const std::vector<std::pair<std::string, const Report*>>& refs) {
  Outcome o{true, ""};
  for (const auto& [id, report] : refs) {
    const auto* row = report->find_criterion(id);
    if (!row) {
      o.pass = false;
      o.detail += id + " missing; ";
      continue;
    }
    o.pass = o.pass && row->status == Status::pass;
    o.detail += fmt("%s[%s] %s=%.4g (%s); ", id.c_str(), row->model.c_str(), row->statistic.c_str(),
                    row->value, to_string(row->status).c_str());
  }
  return o;
}

// --- AC1 / AC2 --------------------------------------------------------------

StepFunction random_scalar(std::mt19937_64& rng, int max_jumps) {
  std::uniform_int_distribution<int> count(0, max_jumps);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const int k = count(rng);
  std::vector<double> times;
  for (int i = 0; i < k; ++i) times.push_back(time(rng));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<double> values;
  for (std::size_t i = 0; i < times.size(); ++i) values.push_back(value(rng));
  return StepFunction({value(rng)}, times, values);
}

StepFunction random_path(std::mt19937_64& rng, std::size_t d, int max_jumps) {
  std::uniform_int_distribution<int> count(0, max_jumps);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<double> times;
  for (int i = count(rng); i > 0; --i) times.push_back(time(rng));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<double> init(d), values(d * times.size());
  for (auto& v : init) v = value(rng);
  for (auto& v : values) v = value(rng);
  return StepFunction(init, times, values);
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst_oracle = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto x = random_scalar(rng, 4);
    const auto y = random_scalar(rng, 4);
    const double d = m1_distance(x, y, 1e-5).value;
    worst_oracle = std::max(worst_oracle, std::abs(d - m1_oracle(x, y, 2000)));
  }
  const double tol = kDefaultMetricTol;
  bool symmetric = true;
  double worst_identity = 0.0;
  double worst_triangle = -1.0;
  for (int i = 0; i < 200; ++i) {
    const auto x = random_scalar(rng, 10);
    const auto y = random_scalar(rng, 10);
    const auto z = random_scalar(rng, 10);
    const double xy = m1_distance(x, y, tol).value;
    symmetric = symmetric && xy == m1_distance(y, x, tol).value;
    worst_identity = std::max(worst_identity, m1_distance(x, x, tol).value);
    const double excess = m1_distance(x, z, tol).value - xy - m1_distance(y, z, tol).value;
    worst_triangle = std::max(worst_triangle, excess);
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_oracle <= 1e-3 && symmetric && worst_identity <= tol &&
                    worst_triangle <= 3 * tol && secs < 120.0;
  return {pass, fmt("max |m1 - oracle| = %.3g (<= 1e-3); symmetry %s; max d(x,x) = %.3g; "
                    "max triangle excess = %.3g (<= 3 tol); %.1fs (< 120s)",
                    worst_oracle, symmetric ? "exact" : "BROKEN", worst_identity, worst_triangle,
                    secs)};
}

Outcome ac2() {
  std::mt19937_64 rng(202);
  const double tol = kDefaultMetricTol;
  double worst = -1e300;
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
    const auto x = random_path(rng, d, 10);
    const auto y = random_path(rng, d, 10);
    worst = std::max(worst, weak_m1_distance(x, y, tol).value - uniform_distance(x, y));
  }
  return {worst <= tol, fmt("max (d_p - d_U) = %.3g over 200 pairs (<= tol %.0e)", worst, tol)};
}

// --- AC10 -------------------------------------------------------------------

// Random measure in Lambda meeting the probe preconditions for jitter 1e-2.
PointMeasure random_lambda_measure(std::mt19937_64& rng, double u) {
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = dim(rng);
  PointMeasure eta;
  eta.dim = d;
  eta.lower_cutoff = 0.1;
  std::vector<double> times;
  const int k = count(rng);
  while (static_cast<int>(times.size()) < k) {
    const double t = 0.05 + 0.9 * unit(rng);
    bool far = true;
    for (double s : times) far = far && std::abs(s - t) > 0.05;
    if (far) times.push_back(t);
  }
  auto magnitude = [&]() {
    return unit(rng) < 0.5 ? 0.2 + (u - 0.25) * unit(rng) : u + 0.05 + 2.0 * unit(rng);
  };
  for (double t : times) {
    std::vector<double> signs(d);
    for (auto& s : signs) s = unit(rng) < 0.5 ? -1.0 : 1.0;
    // Atoms sharing a time share an orthant.
    const int copies = unit(rng) < 0.2 ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
      Atom a{t, std::vector<double>(d)};
      for (std::size_t j = 0; j < d; ++j) a.mark[j] = signs[j] * magnitude();
      eta.atoms.push_back(a);
    }
  }
  return eta;
}

Outcome ac10() {
  std::mt19937_64 rng(1010);
  const double u = 1.0;
  const double tol = 1e-5;
  int ok = 0;
  double worst_excess = -1.0;
  int nonmonotone = 0;
  for (int i = 0; i < 100; ++i) {
    const auto eta = random_lambda_measure(rng, u);
    if (!lambda_membership(eta, u).member) {
      return {false, fmt("generator produced a measure outside Lambda at case %d", i)};
    }
    const auto coarse = psi_continuity_probe(eta, u, 1e-2, 500 + i, tol);
    const auto fine = psi_continuity_probe(eta, u, 1e-3, 500 + i, tol);
    worst_excess = std::max({worst_excess, coarse.output_distance - 1e-2 - tol,
                             fine.output_distance - 1e-3 - tol});
    const bool bounded =
        coarse.output_distance <= 1e-2 + tol && fine.output_distance <= 1e-3 + tol;
    const bool monotone = fine.output_distance <= coarse.output_distance;
    nonmonotone += monotone ? 0 : 1;
    ok += bounded && monotone ? 1 : 0;
  }
  return {ok == 100, fmt("%d/100 measures within jitter + tol at jitter 1e-2 and 1e-3 "
                         "(max excess %.3g), %d non-monotone",
                         ok, worst_excess, nonmonotone)};
}

// --- AC12 -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac12() {
  const char* names[] = {"convergence_symmetric_a15", "counterexample_lagged_q1", "theta_lagged_q1",
                         "cluster_iid", "diagnostics_sre"};
  int identical = 0;
  std::string detail;
  for (const char* name : names) {
    auto c = load(name);
    // Reduced sizes; the comparison is about bytes, not statistics.
    c.replications = 24;
    c.dp_replications = 4;
    c.n_grid.resize(std::min<std::size_t>(c.n_grid.size(), 2));
    for (auto& n : c.n_grid) n = std::min<std::size_t>(n, 20000);
    const auto dir = kOutDir / "determinism" / name;
    ::setenv("CADLAG_THREADS", "1", 1);
    write_report(run_experiment(c), (dir / "first").string());
    ::setenv("CADLAG_THREADS", "3", 1);
    write_report(run_experiment(c), (dir / "second").string());
    ::unsetenv("CADLAG_THREADS");
    const auto a = slurp(dir / "first" / "report.csv");
    const auto b = slurp(dir / "second" / "report.csv");
    const bool same = !a.empty() && a == b;
    identical += same ? 1 : 0;
    if (!same) detail += std::string(name) + " differs; ";
  }
  return {identical == 5,
          fmt("%d/5 experiment kinds byte-identical across reruns (1 vs 3 threads) %s", identical,
              detail.c_str())};
}

}  // namespace

int main() {
  fs::create_directories(kOutDir);
  int failures = 0;
  auto report = [&](const char* id, const char* title, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%-4s %s  %s: %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report("AC1", "metric correctness", ac1);
  report("AC2", "domination by the uniform metric", ac2);
  report("AC3", "stable limit", [] {
    const auto a = run("convergence_symmetric_a07");
    const auto b = run("convergence_symmetric_a15");
    auto o = rows_pass({{"AC3", &a.report}, {"AC3", &b.report}});
    const bool fast = a.seconds < 300.0 && b.seconds < 300.0;
    o.pass = o.pass && fast;
    o.detail += fmt("runtimes %.1fs, %.1fs (< 300s each)", a.seconds, b.seconds);
    return o;
  });
  report("AC4", "extremal index", [] {
    const auto a = run("theta_lagged_q1");
    const auto b = run("theta_lagged_q3");
    auto o = rows_pass(
        {{"AC4a", &a.report}, {"AC4b", &a.report}, {"AC4a", &b.report}, {"AC4b", &b.report}});
    o.pass = o.pass && a.seconds < 120.0 && b.seconds < 120.0;
    o.detail += fmt("runtimes %.1fs, %.1fs (< 120s each)", a.seconds, b.seconds);
    return o;
  });
  Run cluster_iid;
  report("AC5", "cluster law", [&] {
    const auto a = run("cluster_lagged_q1");
    cluster_iid = run("cluster_iid");
    return rows_pass({{"AC5", &a.report}, {"AC5", &cluster_iid.report}});
  });
  report("AC6", "Poisson exceedances",
         [&] { return rows_pass({{"AC6", &cluster_iid.report}}); });
  report("AC7", "nu^(u) shape", [] {
    const auto a = run("diagnostics_iid_a15");
    return rows_pass({{"AC7", &a.report}});
  });
  report("AC8", "Karamata ratio", [] {
    const auto a = run("diagnostics_iid_a05");
    const auto b = run("diagnostics_iid_a025");
    return rows_pass({{"AC8", &a.report}, {"AC8", &b.report}});
  });
  report("AC9", "counterexample", [] {
    const auto a = run("counterexample_lagged_q1");
    auto o = rows_pass({{"AC9a", &a.report}, {"AC9b", &a.report}, {"AC9c", &a.report}});
    o.pass = o.pass && a.seconds < 600.0;
    o.detail += fmt("runtime %.1fs (< 600s)", a.seconds);
    return o;
  });
  report("AC10", "psi^(u) continuity", ac10);
  report("AC11", "sign lemma on tail windows", [] {
    const auto a = run("diagnostics_lagged_q2");
    const auto b = run("diagnostics_sre");
    return rows_pass({{"AC11", &a.report}, {"AC11", &b.report}});
  });
  report("AC12", "determinism", ac12);

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
