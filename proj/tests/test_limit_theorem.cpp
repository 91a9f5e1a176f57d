#include "cadlag/limit_theorem.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cadlag/metrics.hpp"
#include "cadlag/random.hpp"
#include "cadlag/statistics.hpp"
#include "doctest.h"

using namespace cadlag;

namespace {

Sample scalar_sample(std::vector<double> values) {
  Sample s;
  s.dim = 1;
  s.n = values.size();
  s.values = std::move(values);
  s.config.n = s.n;
  return s;
}

ModelConfig lagged_config(std::size_t q, double alpha, std::size_t n, std::uint64_t seed) {
  ModelConfig c;
  c.kind = ModelKind::lagged;
  c.q = q;
  c.alpha = alpha;
  c.n = n;
  c.seed = seed;
  return c;
}

PointMeasure measure(std::size_t dim, std::vector<Atom> atoms, double v = 0.1) {
  PointMeasure pm;
  pm.dim = dim;
  pm.lower_cutoff = v;
  pm.atoms = std::move(atoms);
  return pm;
}

}  // namespace

TEST_CASE("summation functional examples") {
  const auto eta = measure(2, {{0.5, {2.0, -3.0}}});
  auto f = summation_functional(eta, 1.0);
  CHECK(eval(f, 0.49) == std::vector<double>{0.0, 0.0});
  CHECK(eval(f, 0.5) == std::vector<double>{2.0, -3.0});
  f = summation_functional(eta, 2.5);
  CHECK(eval(f, 0.5) == std::vector<double>{0.0, -3.0});
  const auto empty = summation_functional(measure(2, {}), 1.0);
  CHECK(empty.jump_count() == 0);
  CHECK(sup_norm(empty) == 0.0);
  CHECK_THROWS_AS(summation_functional(eta, 0.05), std::invalid_argument);
  // Atoms at time zero enter the initial value.
  const auto at_zero = summation_functional(measure(1, {{0.0, {2.0}}, {0.3, {1.5}}}), 1.0);
  CHECK(at_zero.initial_value()[0] == 2.0);
  CHECK(eval(at_zero, 1.0)[0] == 3.5);
}

TEST_CASE("summation functional is monotone in the level") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> mark(-4.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Atom> atoms;
    for (int i = 0; i < 8; ++i) {
      Atom a{unit(rng), {mark(rng), mark(rng)}};
      if (max_norm(a.mark) > 0.2) atoms.push_back(a);
    }
    const auto eta = measure(2, atoms, 0.2);
    const double u1 = 0.5;
    const double u2 = 1.5;
    const auto low = summation_functional(eta, u1);
    const auto high = summation_functional(eta, u2);
    // psi^(u1) - psi^(u2) sums exactly the coordinates with u1 < |x| <= u2.
    for (double t : {0.1, 0.3, 0.5, 0.7, 1.0}) {
      std::vector<double> expected(2, 0.0);
      for (const auto& a : atoms) {
        if (a.time > t) continue;
        for (std::size_t j = 0; j < 2; ++j) {
          const double x = std::abs(a.mark[j]);
          if (x > u1 && x <= u2) expected[j] += a.mark[j];
        }
      }
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(eval(low, t)[j] - eval(high, t)[j] == doctest::Approx(expected[j]));
      }
    }
  }
}

TEST_CASE("continuity set membership") {
  CHECK(lambda_membership(measure(1, {{0.5, {2.0}}}), 1.0).member);
  const auto boundary = lambda_membership(measure(1, {{0.0, {2.0}}}), 1.0);
  CHECK_FALSE(boundary.member);
  CHECK(boundary.violations.size() == 1);
  CHECK(lambda_membership(measure(1, {{1.0, {0.5}}}), 1.0).member);
  CHECK_FALSE(lambda_membership(measure(1, {{0.5, {2.0}}, {0.5, {-3.0}}}), 1.0).member);
  CHECK(lambda_membership(measure(1, {{0.5, {2.0}}, {0.5, {3.0}}}), 1.0).member);
  CHECK_FALSE(lambda_membership(measure(1, {{0.5, {1.0}}}), 1.0).member);
  // A zero coordinate places the atom in no orthant.
  CHECK(lambda_membership(measure(2, {{0.5, {2.0, 0.0}}, {0.5, {-3.0, 1.5}}}), 1.0).member);
}

TEST_CASE("continuity probe") {
  const auto single = measure(1, {{0.5, {2.0}}});
  const auto zero = psi_continuity_probe(single, 1.0, 0.0, 1);
  CHECK(zero.output_distance == 0.0);
  const auto small = psi_continuity_probe(single, 1.0, 1e-3, 1);
  CHECK(small.input_perturbation <= 1e-3);
  CHECK(small.output_distance <= small.input_perturbation + 1e-5);
  CHECK_THROWS_AS(psi_continuity_probe(measure(1, {{0.5, {2.0}}, {0.5, {-3.0}}}), 1.0, 1e-3, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(psi_continuity_probe(measure(1, {{0.5, {1.0005}}}), 1.0, 1e-3, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(psi_continuity_probe(measure(1, {{0.3, {2.0}}, {0.3015, {2.0}}}), 1.0, 1e-3, 1),
                  std::invalid_argument);
  // Same-time atoms in one orthant split into two nearby jumps.
  const auto pair = measure(2, {{0.4, {2.0, 1.5}}, {0.4, {3.0, 4.0}}, {0.8, {-2.0, 0.5}}});
  for (double j : {1e-2, 1e-3}) {
    const auto r = psi_continuity_probe(pair, 1.0, j, 9);
    CHECK(r.output_distance <= j + 1e-5);
  }
}

TEST_CASE("partial sum process basics") {
  const auto one = scalar_sample({2.0});
  const auto v = partial_sum_process(one, 0.5);
  REQUIRE(v.jump_count() == 1);
  CHECK(v.jump_time(0) == 1.0);
  CHECK(v.jump_value(0)[0] == doctest::Approx(2.0));

  const auto s = sample_pareto(0.6, 1000, 3, false);
  const double an = normalizing_an(0.6, 1000);
  const std::vector<double> zero{0.0};
  const auto raw = partial_sum_process(s, an, zero);
  double sum = 0.0;
  for (double x : s.values) sum += x;
  CHECK(eval(raw, 1.0)[0] == doctest::Approx(sum / an));
  CHECK(eval(raw, 0.5)[0] <= eval(raw, 1.0)[0]);

  const auto centred = partial_sum_process(s, 0.6);
  const double c = pareto_truncated_mean(0.6, an, 0.0, false);
  CHECK(eval(centred, 1.0)[0] == doctest::Approx(sum / an - 1000 * c));
  CHECK_THROWS_AS(partial_sum_process(s, an, std::vector<double>{0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("truncated Pareto mean against quadrature") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const double a = 50.0;
    for (double u : {0.0, 0.1, 0.5}) {
      const double lo = std::max(1.0, u * a);
      const double q =
          ts.integrate([&](double z) { return z / a * alpha * std::pow(z, -alpha - 1.0); }, lo, a);
      CHECK(pareto_truncated_mean(alpha, a, u, false) == doctest::Approx(q).epsilon(1e-10));
      CHECK(pareto_truncated_mean(alpha, a, u, true) == 0.0);
    }
  }
}

TEST_CASE("lagged coordinate paths differ by the boundary terms") {
  const auto s = simulate(lagged_config(1, 1.5, 2000, 12));
  const double an = normalizing_an(1.5, s.n);
  const auto v = partial_sum_process(s, 1.5);
  const double z0 = s.row(0)[1];
  for (std::size_t k : {1u, 10u, 1000u, 2000u}) {
    const double t = static_cast<double>(k) / 2000.0;
    const auto val = eval(v, t);
    const double zk = s.row(k - 1)[0];
    CHECK(val[0] - val[1] == doctest::Approx((zk - z0) / an).epsilon(1e-9));
  }
}

TEST_CASE("pathwise identity between full, truncated and small-jump sums") {
  for (auto kind : {ModelKind::iid_pareto, ModelKind::iid_symmetric_pareto, ModelKind::lagged}) {
    ModelConfig c;
    c.kind = kind;
    c.alpha = 1.2;
    c.n = 3000;
    c.seed = 8;
    const auto s = simulate(c);
    for (double u : {0.01, 0.1, 1.0}) {
      const auto full = partial_sum_process(s, c.alpha);
      const auto large = truncated_partial_sum(s, c.alpha, u);
      const double stat = small_jump_statistic(s, c.alpha, u);
      CHECK(stat == doctest::Approx(uniform_distance(full, large)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(truncated_partial_sum(scalar_sample({2.0}), 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("truncation is vacuous when every entry is large") {
  const auto s = scalar_sample({5.0, 9.0, 30.0});
  const double an = 2.0;
  const std::vector<double> zero{0.0};
  CHECK(truncated_partial_sum(s, an, 1e-3, zero) == partial_sum_process(s, an, zero));
  const std::vector<double> c{0.25};
  CHECK(small_jump_statistic(s, an, 1e-3, c) == doctest::Approx(3 * 0.25));
  const auto huge = scalar_sample({1.0, 1.0, 1000.0, 1.0});
  const auto t = truncated_partial_sum(huge, 100.0, 0.5, zero);
  REQUIRE(t.jump_count() == 1);
  CHECK(t.jump_time(0) == 0.75);
}

TEST_CASE("exceedance process") {
  const auto small = scalar_sample({1.0, 2.0, 1.5});
  CHECK(exceedance_process(small, 10.0, 1.0).atoms.empty());

  const auto s = sample_pareto(1.5, 200000, 21, true);
  const double an = normalizing_an(1.5, s.n);
  const double u = 0.05;
  const auto pm = exceedance_process(s, an, u);
  const double p = std::pow(an * u, -1.5);
  const double sd = std::sqrt(s.n * p * (1.0 - p));
  CHECK(std::abs(static_cast<double>(pm.atoms.size()) - s.n * p) <= 3.0 * sd);

  const std::vector<double> zero{0.0};
  const auto psi = summation_functional(pm, u);
  const auto direct = truncated_partial_sum(s, an, u, zero);
  CHECK(uniform_distance(psi, direct) <= 1e-9);
}

TEST_CASE("cluster extraction") {
  const auto s = sample_pareto(1.5, 10000, 4, false);
  CHECK(extract_clusters(s, 1e9, 1.0, 100).empty());
  CHECK_THROWS_AS(extract_clusters(s, 1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(extract_clusters(s, 1.0, 1.0, 10001), std::invalid_argument);

  std::vector<double> v(1000, 1.0);
  v[537] = 1e6;
  const auto one = extract_clusters(scalar_sample(v), 1000.0, 1.0, 100);
  REQUIRE(one.size() == 1);
  CHECK(one[0].block == 5);
  CHECK(one[0].first_exceedance == 537);
  CHECK(one[0].exceedances() == 1);
  CHECK(one[0].length() == 100);
}

TEST_CASE("lagged cluster sizes match direct enumeration") {
  const std::size_t n = 20000;
  const std::size_t r = 200;
  const auto s = simulate(lagged_config(1, 1.0, n, 31));
  const double level = 300.0;
  const auto z = sample_pareto(1.0, n + 1, 31, false).values;  // z[k] = Z_k
  // A large Z_k makes rows k-1 and k (0-based rows, row t holds (Z_{t+1}, Z_t)) exceed.
  std::set<std::size_t> rows;
  for (std::size_t k = 0; k <= n; ++k) {
    if (z[k] > level) {
      if (k >= 1) rows.insert(k - 1);
      if (k < n) rows.insert(k);
    }
  }
  const auto clusters = extract_clusters(s, level, 1.0, r);
  std::size_t total = 0;
  for (const auto& c : clusters) {
    std::size_t expected = 0;
    for (auto t : rows) expected += (t / r == c.block) ? 1 : 0;
    CHECK(c.exceedances() == expected);
    total += c.exceedances();
  }
  const auto counts = count_blocks(s, level, 1.0, r);
  double counted_total = 0.0;
  for (double e : counts.exceedances) counted_total += e;
  CHECK(static_cast<double>(total) == counted_total);
  std::size_t covered = 0;
  for (auto t : rows) covered += t < (n / r) * r ? 1 : 0;
  CHECK(total == covered);
}

TEST_CASE("blocks estimator of the extremal index") {
  CHECK_THROWS_AS(estimate_theta_blocks(scalar_sample({1.0, 1.0}), 10.0, 1.0, 1), EstimationError);
  const std::size_t n = 1000000;
  const double u = 0.1;
  {
    ModelConfig c;
    c.alpha = 1.5;
    c.n = n;
    c.seed = 5;
    const auto s = simulate(c);
    const auto e = estimate_theta_blocks(s, normalizing_an(1.5, n), u, default_block_length(n));
    CHECK(e.value == doctest::Approx(1.0).epsilon(0.05));
    CHECK(e.value <= 1.0);
  }
  for (std::size_t q : {1u, 3u}) {
    const auto s = simulate(lagged_config(q, 1.5, n, 6 + q));
    const auto e = estimate_theta_blocks(s, normalizing_an(1.5, n), u, default_block_length(n));
    CAPTURE(q);
    CHECK(std::abs(e.value - 1.0 / (q + 1)) < 0.07);
    REQUIRE(e.stderr_value);
  }
}

TEST_CASE("tail process windows") {
  const auto s = sample_pareto(1.5, 400000, 13, false);
  const double thr = 200.0;
  const auto w = estimate_tail_process(s, thr, 1);
  REQUIRE(w.size() > 10);
  std::vector<double> side;
  for (const auto& x : w) {
    CHECK(x.norm_at_center > 1.0);
    CHECK(x.at(0)[0] * thr == doctest::Approx(s.values[x.center_index]));
    side.push_back(std::abs(x.at(1)[0]));
    side.push_back(std::abs(x.at(-1)[0]));
  }
  CHECK(median(side) < 0.1);

  const auto l = simulate(lagged_config(1, 1.5, 400000, 14));
  for (const auto& x : estimate_tail_process(l, thr, 2)) {
    if (x.at(0)[0] >= x.at(0)[1]) {
      CHECK(x.at(1)[1] == x.at(0)[0]);
    }
  }
  // Windows overlapping the boundary are dropped.
  std::vector<double> edge(50, 1.0);
  edge[0] = edge[49] = edge[25] = 1e6;
  const auto e = estimate_tail_process(scalar_sample(edge), 100.0, 3);
  REQUIRE(e.size() == 1);
  CHECK(e[0].center_index == 25);
}

TEST_CASE("spectral extremal index") {
  TailWindow w;
  w.m = 2;
  w.dim = 1;
  w.values = {0.0, 0.0, 3.0, 0.0, 0.0};
  w.norm_at_center = 3.0;
  std::vector<TailWindow> iid(5, w);
  for (std::size_t i = 0; i < iid.size(); ++i) iid[i].group = i;
  CHECK(theta_from_spectral(iid, 1.5).value == 1.0);
  CHECK_THROWS_AS(theta_from_spectral(std::vector<TailWindow>{}, 1.5), std::invalid_argument);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> g(-3.0, 3.0);
  std::vector<TailWindow> random(50, w);
  for (std::size_t i = 0; i < random.size(); ++i) {
    for (auto& v : random[i].values) v = g(rng);
    random[i].values[2] = 1.5;
    random[i].group = i / 3;
  }
  const auto r = theta_from_spectral(random, 0.8);
  CHECK(r.value >= 0.0);
  CHECK(r.value <= 1.0);

  const std::size_t n = 1000000;
  const auto s = simulate(lagged_config(1, 1.5, n, 40));
  const double an = normalizing_an(1.5, n);
  const double u = 0.1;
  const auto windows = estimate_tail_process(s, an * u, 5);
  const auto spectral = theta_from_spectral(windows, 1.5);
  const auto blocks = estimate_theta_blocks(s, an, u, default_block_length(n));
  REQUIRE(spectral.stderr_value);
  REQUIRE(blocks.stderr_value);
  const double joint = std::hypot(*spectral.stderr_value, *blocks.stderr_value);
  CHECK(spectral.value == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(spectral.value - blocks.value) <= 2.0 * joint + 0.01);
}

TEST_CASE("nu^(u) for i.i.d. Pareto windows") {
  const auto s = sample_pareto(1.5, 20000000, 77, false);
  const double thr = std::pow(1000.0, 1.0 / 1.5);
  const auto windows = estimate_tail_process(s, thr, 3);
  const double u = 0.5;
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto nu = nu_u_estimate(windows, 1.5, u, grid);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& p : nu) {
    CAPTURE(p.x);
    CHECK(p.value <= previous);
    previous = p.value;
    CHECK(p.value == doctest::Approx(nu_u_iid_closed_form(1.5, u, p.x)).epsilon(0.05));
  }
  CHECK(nu_u_iid_closed_form(1.5, u, 0.1) == nu_u_iid_closed_form(1.5, u, u));
  CHECK_THROWS_AS(nu_u_estimate(std::vector<TailWindow>{}, 1.5, u, grid), EstimationError);

  TailWindow noisy;
  noisy.m = 1;
  noisy.values = {5.0, 2.0, 0.0};
  noisy.norm_at_center = 2.0;
  CHECK_THROWS_AS(nu_u_estimate(std::vector<TailWindow>{noisy}, 1.5, u, grid), EstimationError);
}

TEST_CASE("nu^(u) product boxes") {
  TailWindow w;
  w.m = 1;
  w.dim = 2;
  w.values = {0.0, 0.0, 2.0, 0.5, 0.0, 3.0};
  w.norm_at_center = 2.0;
  const std::vector<TailWindow> ws{w};
  const double lo[] = {0.5, 1.0};
  const double hi[] = {1.5, 2.0};
  // u sums: coordinate 1 -> 0.5 * 2 = 1, coordinate 2 -> 0.5 * 3 = 1.5.
  CHECK(nu_u_box(ws, 1.0, 0.5, lo, hi).value == doctest::Approx(2.0));
  const double hi2[] = {1.5, 1.4};
  CHECK(nu_u_box(ws, 1.0, 0.5, lo, hi2).value == 0.0);
}

TEST_CASE("opposite-sign check") {
  CHECK(opposite_sign_check(std::vector<TailWindow>{}).passed());
  TailWindow w;
  w.m = 1;
  w.dim = 2;
  w.values = {1.0, 0.0, 2.0, 0.5, -1.0, 0.0};
  const auto c = opposite_sign_check(std::vector<TailWindow>{w});
  CHECK_FALSE(c.passed());
  CHECK_FALSE(c.coordinates[0]);
  CHECK(c.coordinates[1]);
  const auto s = simulate(lagged_config(2, 0.8, 100000, 3));
  CHECK(opposite_sign_check(estimate_tail_process(s, 1000.0, 4)).passed());
}

TEST_CASE("small-jump statistic shrinks with the level for alpha below one") {
  std::vector<double> at_01, at_001;
  for (std::uint64_t r = 0; r < 40; ++r) {
    const auto s = sample_pareto(0.5, 20000, stream_seed(99, r), false);
    at_01.push_back(small_jump_statistic(s, 0.5, 0.1));
    at_001.push_back(small_jump_statistic(s, 0.5, 0.01));
  }
  CHECK(median(at_01) > median(at_001));
}

TEST_CASE("Karamata ratio") {
  CHECK(karamata_ratio(0.5, 0.5, 1000000) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(karamata_ratio(0.25, 0.5, 1000000) == doctest::Approx(1.0 / 3.0).epsilon(0.02 * 3));
  CHECK(karamata_ratio(0.5, 0.5, 1000000000) > karamata_ratio(0.5, 0.5, 1000000));
  CHECK_THROWS_AS(karamata_ratio(1.0, 0.5, 100), std::invalid_argument);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double alpha : {0.25, 0.5, 0.8}) {
    const double y = 0.5 * std::pow(1e3, 1.0 / alpha);
    const double num =
        ts.integrate([&](double x) { return x * alpha * std::pow(x, -alpha - 1.0); }, 1.0, y);
    const double expected = num / (y * std::pow(y, -alpha));
    CHECK(karamata_ratio(alpha, 0.5, 1000) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("anticluster statistic for the lagged model") {
  const std::size_t n = 1000000;
  const auto s = simulate(lagged_config(1, 1.5, n, 17));
  const double an = normalizing_an(1.5, n);
  // Neighbouring clusters within r_n are rare at this rate: about 2 r_n 63 / n.
  CHECK(anticluster_statistic(s, an, 0.1, 2, 100).value < 0.05);
  CHECK(anticluster_statistic(s, an, 0.1, 1, 100).value > 0.95);
}
