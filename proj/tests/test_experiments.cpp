#include "cadlag/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cadlag/json_io.hpp"
#include "cadlag/limit_theorem.hpp"
#include "cadlag/parallel.hpp"
#include "doctest.h"

using namespace cadlag;
using nlohmann::json;

namespace {

ExperimentConfig small(ExperimentKind kind, ModelKind model, double alpha) {
  ExperimentConfig c;
  c.experiment = kind;
  c.model.kind = model;
  c.model.alpha = alpha;
  c.replications = 40;
  c.n_grid = {500, 2000};
  c.seed = 7;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("step function JSON round trip") {
  const StepFunction f({0.5, -1.0}, {0.25, 0.75}, {1.0, -1.0, 2.0, 3.0});
  const auto j = to_json(f);
  CHECK(j.at("dim") == 2);
  CHECK(j.at("jumps").size() == 2);
  CHECK(j.at("jumps")[1].at("t") == 0.75);
  CHECK(step_function_from_json(j) == f);
  CHECK(step_function_from_json(json::parse(j.dump())) == f);
  CHECK_THROWS_AS(step_function_from_json(json{{"dim", 2}, {"initial", {0.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(step_function_from_json(json{{"initial", {0.0}}}), std::invalid_argument);
}

TEST_CASE("model and sample serialisation") {
  ModelConfig m;
  m.kind = ModelKind::lagged;
  m.q = 3;
  m.alpha = 0.8;
  const auto back = model_config_from_json(to_json(m));
  CHECK(back.kind == ModelKind::lagged);
  CHECK(back.q == 3);
  CHECK(back.alpha == 0.8);
  m.n = 4;
  const auto s = simulate(m);
  std::ostringstream csv;
  write_sample_csv(csv, s);
  std::istringstream lines(csv.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    ++count;
  }
  CHECK(count == 4);
  const auto j = to_json(s);
  CHECK(j.at("rows").size() == 4);
  CHECK(j.at("rows")[2][1].get<double>() == s.row(2)[1]);
}

TEST_CASE("report formatting and status") {
  Report r;
  r.add({"e", "iid_pareto", 1.5, 10, "stat", 0.1234567890123, std::nullopt, "", Status::info});
  r.add_criterion({"e", "iid_pareto", 1.5, 10, "ks", 0.02, 0.001, "AC3", Status::pass});
  CHECK(r.overall() == Status::pass);
  CHECK_THROWS_AS(r.add_criterion({"e", "m", 1.5, 10, "ks", 0.0, {}, "AC3", Status::pass}),
                  std::logic_error);
  const auto csv = report_csv(r);
  CHECK(csv ==
        "experiment,model,alpha,n,statistic,value,stderr,criterion,status\n"
        "e,iid_pareto,1.5,10,stat,0.123456789,NA,,info\n"
        "e,iid_pareto,1.5,10,ks,0.02,0.001,AC3,pass\n");
  r.add_criterion({"e", "m", 1.5, 10, "x", 0.0, {}, "AC4a", Status::inconclusive});
  CHECK(r.overall() == Status::inconclusive);
  CHECK(exit_code(r.overall()) == 2);
  r.add_criterion({"e", "m", 1.5, 10, "x", 0.0, {}, "AC4b", Status::fail});
  CHECK(r.overall() == Status::fail);
  CHECK(exit_code(r.overall()) == 1);
  CHECK(exit_code(Status::pass) == 0);
  const auto j = to_json(r);
  CHECK(j.at("overall") == "fail");
  CHECK(j.at("rows")[0].at("stderr").is_null());
}

TEST_CASE("parallel map keeps index order and propagates errors") {
  ::setenv("CADLAG_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  const auto v = parallel_map(1000, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
  CHECK_THROWS_AS(parallel_map(50,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                                 return i;
                               }),
                  std::runtime_error);
  CHECK(parallel_map(0, [](std::size_t i) { return i; }).empty());
  ::unsetenv("CADLAG_THREADS");
}

TEST_CASE("config parsing and validation") {
  const auto c = experiment_config_from_json(json::parse(R"({
    "experiment": "theta_study",
    "model": {"kind": "lagged", "q": 3, "alpha": 1.2},
    "replications": 10, "n_grid": [100, 1000], "seed": 5,
    "tolerances": {"theta": 0.1}
  })"));
  CHECK(c.experiment == ExperimentKind::theta_study);
  CHECK(c.model.q == 3);
  CHECK(c.tol.theta == 0.1);
  CHECK(c.tol.ks == 0.05);
  const auto round = experiment_config_from_json(to_json(c));
  CHECK(to_json(round) == to_json(c));
  auto bad = [](const char* text) { return experiment_config_from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"experiment": "convergence", "replications": 0})"), std::invalid_argument);
  CHECK_THROWS_AS(bad(R"({"experiment": "convergence", "n_grid": []})"), std::invalid_argument);
  CHECK_THROWS_AS(bad(R"({"experiment": "convergence", "n_grid": [100, 10]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad(R"({"experiment": "nope"})"), std::invalid_argument);
  CHECK_THROWS_AS(bad(R"({"experiment": "convergence", "model": {"alpha": 2.5}})"),
                  std::invalid_argument);
}

TEST_CASE("every criterion id appears once and carries a verdict") {
  const ExperimentKind kinds[] = {ExperimentKind::convergence, ExperimentKind::theta_study,
                                  ExperimentKind::cluster_study, ExperimentKind::diagnostics};
  for (auto kind : kinds) {
    auto c = small(kind, ModelKind::iid_symmetric_pareto, 0.7);
    const auto r = run_experiment(c);
    std::set<std::string> seen;
    for (const auto& row : r.rows) {
      CHECK((row.status == Status::info) == row.criterion.empty());
      if (!row.criterion.empty()) {
        CHECK(seen.insert(row.criterion).second);
        CHECK(row.criterion.rfind("AC", 0) == 0);
      }
    }
    CHECK(r.metadata.at("seed") == 7);
  }
}

TEST_CASE("single replication is reported without a standard error") {
  auto c = small(ExperimentKind::convergence, ModelKind::iid_pareto, 0.5);
  c.replications = 1;
  const auto r = run_convergence(c);
  bool saw_mean = false;
  for (const auto& row : r.rows) {
    if (row.statistic == "mean V_n(1)") {
      saw_mean = true;
      CHECK_FALSE(row.stderr_value.has_value());
    }
  }
  CHECK(saw_mean);
  CHECK(r.find_criterion("AC3")->status == Status::inconclusive);
  CHECK(report_csv(r).find("NA") != std::string::npos);
}

TEST_CASE("unsupported models are rejected") {
  CHECK_THROWS_AS(run_convergence(small(ExperimentKind::convergence, ModelKind::sre, 1.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_counterexample(small(ExperimentKind::counterexample, ModelKind::iid_pareto, 1.5)),
      std::invalid_argument);
}

TEST_CASE("karamata row equals the closed form") {
  auto c = small(ExperimentKind::diagnostics, ModelKind::iid_pareto, 0.5);
  c.criterion_u = 0.5;
  const auto r = run_diagnostics(c);
  const auto* row = r.find_criterion("AC8");
  REQUIRE(row);
  CHECK(row->value == karamata_ratio(0.5, 0.5, 2000));
}

TEST_CASE("lagged diagnostics see no exceedances beyond lag q") {
  auto c = small(ExperimentKind::diagnostics, ModelKind::lagged, 1.5);
  c.n_grid = {100000};
  c.replications = 20;
  c.m_grid = {1, 2};
  c.block_length = 100;
  const auto r = run_diagnostics(c);
  for (const auto& row : r.rows) {
    if (row.statistic == "anticluster m=2") CHECK(row.value < 0.05);
    if (row.statistic == "anticluster m=1") CHECK(row.value > 0.95);
  }
  CHECK(r.find_criterion("AC11")->status == Status::pass);
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "cadlag_determinism_unit";
  auto c = small(ExperimentKind::theta_study, ModelKind::lagged, 1.5);
  c.u_grid = {0.5, 1.0};
  ::setenv("CADLAG_THREADS", "1", 1);
  write_report(run_experiment(c), (root / "a").string());
  ::setenv("CADLAG_THREADS", "3", 1);
  write_report(run_experiment(c), (root / "b").string());
  ::unsetenv("CADLAG_THREADS");
  CHECK(slurp(root / "a" / "report.csv") == slurp(root / "b" / "report.csv"));
  CHECK(fs::exists(root / "a" / "plotdata" / "theta.csv"));
  CHECK(json::parse(slurp(root / "a" / "report.json")).at("metadata").contains("wall_time_seconds"));
  c.seed = 8;
  write_report(run_experiment(c), (root / "c").string());
  CHECK(slurp(root / "a" / "report.csv") != slurp(root / "c" / "report.csv"));
  fs::remove_all(root);
}
