#include "cadlag/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cadlag {

namespace {

bool same_values(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("time " + std::to_string(t) + " outside [0,1]");
  }
}

}  // namespace

StepFunction::StepFunction(std::vector<double> initial)
    : StepFunction(std::move(initial), {}, {}) {}

StepFunction::StepFunction(std::vector<double> initial, std::vector<double> jump_times,
                           std::vector<double> jump_values) {
  const std::size_t d = initial.size();
  if (d == 0) throw std::invalid_argument("step function needs dim >= 1");
  if (jump_values.size() != jump_times.size() * d) {
    throw std::invalid_argument("jump values do not match jump times and dimension");
  }
  for (double v : initial) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite initial value");
  }
  initial_ = std::move(initial);
  times_.reserve(jump_times.size());
  values_.reserve(jump_values.size());

  double previous_time = 0.0;
  std::span<const double> previous = initial_;
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    const double t = jump_times[i];
    if (!(t > previous_time) || t > 1.0) {
      throw std::invalid_argument("jump times must be strictly increasing in (0,1]");
    }
    previous_time = t;
    std::span<const double> v(jump_values.data() + i * d, d);
    for (double x : v) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite jump value");
    }
    if (same_values(v, previous)) continue;
    times_.push_back(t);
    values_.insert(values_.end(), v.begin(), v.end());
    previous = std::span<const double>(values_.data() + values_.size() - d, d);
  }
}

StepFunction StepFunction::scalar(double initial,
                                  const std::vector<std::pair<double, double>>& jumps) {
  std::vector<double> times;
  std::vector<double> values;
  for (const auto& [t, v] : jumps) {
    times.push_back(t);
    values.push_back(v);
  }
  return StepFunction({initial}, std::move(times), std::move(values));
}

std::span<const double> StepFunction::terminal_value() const {
  return times_.empty() ? initial_value() : jump_value(times_.size() - 1);
}

std::size_t StepFunction::jumps_up_to(double t) const {
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) -
                                  times_.begin());
}

std::vector<double> eval(const StepFunction& f, double t) {
  check_time(t);
  auto v = f.state(f.jumps_up_to(t));
  return {v.begin(), v.end()};
}

std::vector<double> left_limit(const StepFunction& f, double t) {
  check_time(t);
  if (t == 0.0) throw std::domain_error("left limit undefined at t = 0");
  const auto times = f.jump_times();
  const auto k = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) -
                                          times.begin());
  auto v = f.state(k);
  return {v.begin(), v.end()};
}

StepFunction project(const StepFunction& f, std::size_t j) {
  if (j >= f.dim()) {
    throw std::out_of_range("coordinate " + std::to_string(j) + " out of range for dim " +
                            std::to_string(f.dim()));
  }
  std::vector<double> times;
  std::vector<double> values;
  double previous = f.initial_value()[j];
  for (std::size_t i = 0; i < f.jump_count(); ++i) {
    const double v = f.jump_value(i)[j];
    if (v == previous) continue;
    times.push_back(f.jump_time(i));
    values.push_back(v);
    previous = v;
  }
  return StepFunction({f.initial_value()[j]}, std::move(times), std::move(values));
}

StepFunction linear_combination(const StepFunction& f, std::span<const double> c) {
  if (c.size() != f.dim()) throw std::invalid_argument("coefficient size != dim");
  if (std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; })) {
    throw std::domain_error("linear combination with zero coefficient vector");
  }
  auto dot = [&](std::span<const double> v) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += c[j] * v[j];
    return s;
  };
  std::vector<double> times;
  std::vector<double> values;
  times.reserve(f.jump_count());
  values.reserve(f.jump_count());
  for (std::size_t i = 0; i < f.jump_count(); ++i) {
    times.push_back(f.jump_time(i));
    values.push_back(dot(f.jump_value(i)));
  }
  return StepFunction({dot(f.initial_value())}, std::move(times), std::move(values));
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_norm(const StepFunction& f) {
  double m = max_norm(f.initial_value());
  for (std::size_t i = 0; i < f.jump_count(); ++i) m = std::max(m, max_norm(f.jump_value(i)));
  return m;
}

CompletedGraph::CompletedGraph(std::size_t dim, std::vector<double> times,
                               std::vector<double> points)
    : dim_(dim), times_(std::move(times)), points_(std::move(points)) {
  if (points_.size() != times_.size() * dim_) {
    throw std::invalid_argument("graph points do not match vertex count");
  }
}

GraphVertex CompletedGraph::vertex(std::size_t i) const {
  auto p = point(i);
  return {times_[i], {p.begin(), p.end()}};
}

CompletedGraph completed_graph(const StepFunction& f) {
  const std::size_t d = f.dim();
  std::vector<double> times;
  std::vector<double> points;
  times.reserve(2 * f.jump_count() + 2);
  points.reserve((2 * f.jump_count() + 2) * d);
  auto push = [&](double t, std::span<const double> z) {
    times.push_back(t);
    points.insert(points.end(), z.begin(), z.end());
  };
  push(0.0, f.initial_value());
  for (std::size_t i = 0; i < f.jump_count(); ++i) {
    push(f.jump_time(i), f.state(i));
    push(f.jump_time(i), f.state(i + 1));
  }
  if (f.jump_count() == 0 || f.jump_time(f.jump_count() - 1) < 1.0) {
    push(1.0, f.terminal_value());
  }
  return CompletedGraph(d, std::move(times), std::move(points));
}

bool graph_order_leq(const StepFunction& f, const GraphVertex& a, const GraphVertex& b) {
  if (a.t < b.t) return true;
  if (a.t > b.t) return false;
  const auto base = a.t == 0.0 ? eval(f, 0.0) : left_limit(f, a.t);
  for (std::size_t j = 0; j < f.dim(); ++j) {
    if (std::abs(base[j] - a.z[j]) > std::abs(base[j] - b.z[j])) return false;
  }
  return true;
}

}  // namespace cadlag
