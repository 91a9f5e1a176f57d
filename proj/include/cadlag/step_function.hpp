#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cadlag {

/// A d-dimensional cadlag step path on [0,1].
///
/// The path starts at `initial_value()` and switches to `jump_value(i)` at
/// `jump_time(i)`, inclusive. Jump times are strictly increasing and lie in
/// (0,1]. Construction drops null jumps (a stored value identical to its
/// predecessor in every coordinate), so every stored jump changes at least one
/// coordinate. Instances are immutable.
class StepFunction {
 public:
  StepFunction() : StepFunction(std::vector<double>{0.0}) {}

  /// Constant path.
  explicit StepFunction(std::vector<double> initial);

  /// `jump_values` is row-major with one row of `initial.size()` entries per
  /// jump time. Throws std::invalid_argument on malformed input.
  StepFunction(std::vector<double> initial, std::vector<double> jump_times,
               std::vector<double> jump_values);

  static StepFunction scalar(double initial,
                             const std::vector<std::pair<double, double>>& jumps);

  std::size_t dim() const { return initial_.size(); }
  std::size_t jump_count() const { return times_.size(); }

  std::span<const double> initial_value() const { return initial_; }
  double jump_time(std::size_t i) const { return times_[i]; }
  std::span<const double> jump_value(std::size_t i) const {
    return {values_.data() + i * dim(), dim()};
  }
  std::span<const double> jump_times() const { return times_; }
  std::span<const double> jump_values() const { return values_; }

  /// Value after the last jump, i.e. x(1).
  std::span<const double> terminal_value() const;

  /// Number of jumps with time <= t.
  std::size_t jumps_up_to(double t) const;

  /// Value in state k: k = 0 is the initial value, k > 0 is jump k-1.
  std::span<const double> state(std::size_t k) const {
    return k == 0 ? initial_value() : jump_value(k - 1);
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> initial_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Right-continuous value at t in [0,1]; throws std::domain_error otherwise.
std::vector<double> eval(const StepFunction& f, double t);

/// x(t-) for t in (0,1]; throws std::domain_error at t <= 0 or t > 1.
std::vector<double> left_limit(const StepFunction& f, double t);

/// Coordinate path j (0-based). Null jumps of the coordinate are dropped.
StepFunction project(const StepFunction& f, std::size_t j);

/// Scalar path t -> <c, f(t)>. Throws std::domain_error when c is zero.
StepFunction linear_combination(const StepFunction& f, std::span<const double> c);

/// sup_t max_j |f^j(t)|.
double sup_norm(const StepFunction& f);

/// max_j |v^j|
double max_norm(std::span<const double> v);

/// Vertex of a completed graph.
struct GraphVertex {
  double t = 0.0;
  std::vector<double> z;
};

/// Completed graph as a polyline. Consecutive vertices are joined either by a
/// horizontal segment (constant z, increasing t) or a vertical segment (fixed
/// t, z moving on the straight line from x(t-) to x(t)).
class CompletedGraph {
 public:
  CompletedGraph(std::size_t dim, std::vector<double> times, std::vector<double> points);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * dim_, dim_};
  }
  GraphVertex vertex(std::size_t i) const;

 private:
  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> points_;
};

CompletedGraph completed_graph(const StepFunction& f);

/// Graph order on G_f: (t1,z1) <= (t2,z2) iff t1 < t2, or t1 == t2 and
/// |f^j(t1-) - z1^j| <= |f^j(t2-) - z2^j| for every j.
bool graph_order_leq(const StepFunction& f, const GraphVertex& a, const GraphVertex& b);

}  // namespace cadlag
