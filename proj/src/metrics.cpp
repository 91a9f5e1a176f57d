#include "cadlag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cadlag {

namespace {

// Vertices of a scalar completed graph.
struct Polyline {
  std::vector<double> t;
  std::vector<double> z;

  std::size_t segments() const { return t.size() - 1; }
};

Polyline polyline(const StepFunction& f) {
  const auto g = completed_graph(f);
  Polyline p;
  p.t.reserve(g.size());
  p.z.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    p.t.push_back(g.time(i));
    p.z.push_back(g.point(i)[0]);
  }
  return p;
}

double ground(double t1, double z1, double t2, double z2) {
  return std::max(std::abs(t1 - t2), std::abs(z1 - z2));
}

struct Interval {
  double lo = 1.0;
  double hi = 0.0;
  bool empty() const { return lo > hi; }
};

// Parameters s in [0,1] with ground((pt,pz), a + s(b - a)) <= eps.
Interval free_interval(double pt, double pz, double at, double az, double bt, double bz,
                       double eps) {
  Interval r{0.0, 1.0};
  auto clip = [&](double p, double a, double b) {
    const double d = b - a;
    if (d == 0.0) {
      if (std::abs(p - a) > eps) r = Interval{};
      return;
    }
    double s1 = (p - eps - a) / d;
    double s2 = (p + eps - a) / d;
    if (s1 > s2) std::swap(s1, s2);
    r.lo = std::max(r.lo, s1);
    r.hi = std::min(r.hi, s2);
  };
  clip(pt, at, bt);
  clip(pz, az, bz);
  // Endpoint membership is decided by the exact point test so that
  // reachability chains across cell corners are not lost to rounding.
  const bool start_free = ground(pt, pz, at, az) <= eps;
  const bool end_free = ground(pt, pz, bt, bz) <= eps;
  if (start_free && end_free) return {0.0, 1.0};
  if (start_free) return {0.0, std::max(r.hi, 0.0)};
  if (end_free) return {std::min(r.lo, 1.0), 1.0};
  if (r.lo >= 1.0 || r.hi <= 0.0) return {};
  return r;
}

Interval clamp_from(Interval v, double from) {
  v.lo = std::max(v.lo, from);
  return v;
}

// Decides whether the Frechet distance between p and q is <= eps.
class FreeSpaceDecider {
 public:
  FreeSpaceDecider(const Polyline& p, const Polyline& q)
      : p_(p), q_(q), current_(q.segments()), next_(q.segments()) {}

  bool operator()(double eps) {
    const std::size_t m = p_.segments();
    const std::size_t nq = q_.segments();
    if (ground(p_.t[0], p_.z[0], q_.t[0], q_.z[0]) > eps) return false;
    if (ground(p_.t[m], p_.z[m], q_.t[nq], q_.z[nq]) > eps) return false;

    std::fill(current_.begin(), current_.end(), Interval{});
    std::fill(next_.begin(), next_.end(), Interval{});

    // Left boundary of the diagram: p_0 against q, reachable only upwards.
    std::size_t cur_lo = 0, cur_hi = 0;
    for (std::size_t j = 0; j < nq; ++j) {
      if (j > 0 && !(current_[j - 1].hi == 1.0)) break;
      Interval in = free_interval(p_.t[0], p_.z[0], q_.t[j], q_.z[j], q_.t[j + 1], q_.z[j + 1], eps);
      if (in.empty()) break;
      in.lo = 0.0;
      current_[j] = in;
      cur_hi = j + 1;
    }

    bool bottom_open = true;
    const double slack = eps * (1.0 + 1e-12) + 1e-15;
    for (std::size_t i = 0; i < m; ++i) {
      // Bottom boundary: q_0 against segment i of p.
      Interval bottom{};
      if (bottom_open) {
        bottom = free_interval(q_.t[0], q_.z[0], p_.t[i], p_.z[i], p_.t[i + 1], p_.z[i + 1], eps);
        if (bottom.empty()) {
          bottom_open = false;
        } else {
          bottom.lo = 0.0;
          bottom_open = bottom.hi == 1.0;
        }
      }

      // Cells whose time ranges are more than eps apart contain no free point.
      const double a = p_.t[i] - slack;
      const double b = p_.t[i + 1] + slack;
      const auto jlo = static_cast<std::size_t>(
          std::lower_bound(q_.t.begin() + 1, q_.t.end(), a) - (q_.t.begin() + 1));
      const auto jend = static_cast<std::size_t>(
          std::upper_bound(q_.t.begin(), q_.t.end() - 1, b) - q_.t.begin());

      Interval from_below{};
      std::size_t next_lo = jlo, next_hi = jlo;
      for (std::size_t j = jlo; j < jend; ++j) {
        const Interval left = current_[j];
        const Interval below = j == 0 ? bottom : (j == jlo ? Interval{} : from_below);
        if (left.empty() && below.empty()) {
          from_below = Interval{};
          continue;
        }
        const Interval right_free = free_interval(p_.t[i + 1], p_.z[i + 1], q_.t[j], q_.z[j],
                                                  q_.t[j + 1], q_.z[j + 1], eps);
        const Interval top_free = free_interval(q_.t[j + 1], q_.z[j + 1], p_.t[i], p_.z[i],
                                                p_.t[i + 1], p_.z[i + 1], eps);
        const Interval right = below.empty() ? clamp_from(right_free, left.lo) : right_free;
        from_below = left.empty() ? clamp_from(top_free, below.lo) : top_free;
        if (!right.empty()) {
          if (next_hi == next_lo) next_lo = j;
          next_[j] = right;
          next_hi = j + 1;
        }
      }
      for (std::size_t j = cur_lo; j < cur_hi; ++j) current_[j] = Interval{};
      std::swap(current_, next_);
      cur_lo = next_lo;
      cur_hi = next_hi;
      if (cur_hi == cur_lo && !bottom_open) return false;
    }
    return !current_[nq - 1].empty();
  }

 private:
  const Polyline& p_;
  const Polyline& q_;
  std::vector<Interval> current_;
  std::vector<Interval> next_;
};

bool canonical_less(const StepFunction& x, const StepFunction& y) {
  if (x.jump_count() != y.jump_count()) return x.jump_count() < y.jump_count();
  auto lex = [](std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  if (lex(x.initial_value(), y.initial_value())) return true;
  if (lex(y.initial_value(), x.initial_value())) return false;
  if (lex(x.jump_times(), y.jump_times())) return true;
  if (lex(y.jump_times(), x.jump_times())) return false;
  return lex(x.jump_values(), y.jump_values());
}

void require_scalar(const StepFunction& f) {
  if (f.dim() != 1) throw std::invalid_argument("M1 distance needs scalar step functions");
}

void require_same_dim(const StepFunction& x, const StepFunction& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("dimension mismatch");
}

std::vector<double> sample_polyline(const Polyline& p, int k, std::vector<double>& zs) {
  std::vector<double> ts;
  const std::size_t total = p.segments() * static_cast<std::size_t>(k - 1) + 1;
  ts.reserve(total);
  zs.clear();
  zs.reserve(total);
  for (std::size_t i = 0; i < p.segments(); ++i) {
    for (int s = 0; s < k - 1; ++s) {
      const double w = static_cast<double>(s) / static_cast<double>(k - 1);
      ts.push_back(p.t[i] + w * (p.t[i + 1] - p.t[i]));
      zs.push_back(p.z[i] + w * (p.z[i + 1] - p.z[i]));
    }
  }
  ts.push_back(p.t.back());
  zs.push_back(p.z.back());
  return ts;
}

}  // namespace

MetricResult m1_distance(const StepFunction& x, const StepFunction& y, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  require_scalar(x);
  require_scalar(y);
  if (x == y) return {};
  if (canonical_less(y, x)) return m1_distance(y, x, tol);

  const Polyline p = polyline(x);
  const Polyline q = polyline(y);
  FreeSpaceDecider decide(p, q);

  const double floor = std::max(ground(p.t.front(), p.z.front(), q.t.front(), q.z.front()),
                                ground(p.t.back(), p.z.back(), q.t.back(), q.z.back()));
  const double ceiling = uniform_distance(x, y);
  MetricResult r;
  r.refinement_levels = 1;
  if (decide(floor)) {
    r.value = r.lower_bound = r.upper_bound = floor;
    return r;
  }
  double lo = floor;
  double step = tol;
  double hi = floor + step;
  for (;;) {
    if (hi >= ceiling) {
      hi = ceiling;
      ++r.refinement_levels;
      if (decide(hi)) break;
      // Only reachable through rounding at the uniform bound itself.
      hi = ceiling * (1.0 + 1e-12) + 1e-15;
      break;
    }
    ++r.refinement_levels;
    if (decide(hi)) break;
    lo = hi;
    step *= 2.0;
    hi = floor + step;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++r.refinement_levels;
    if (decide(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  r.value = hi;
  r.upper_bound = hi;
  r.lower_bound = lo;
  return r;
}

double m1_oracle(const StepFunction& x, const StepFunction& y, int samples_per_segment) {
  require_scalar(x);
  require_scalar(y);
  if (samples_per_segment < 2) throw std::invalid_argument("need at least 2 samples per segment");
  std::vector<double> xz, yz;
  const auto xt = sample_polyline(polyline(x), samples_per_segment, xz);
  const auto yt = sample_polyline(polyline(y), samples_per_segment, yz);

  const std::size_t ny = yt.size();
  std::vector<double> prev(ny), cur(ny);
  prev[0] = ground(xt[0], xz[0], yt[0], yz[0]);
  for (std::size_t j = 1; j < ny; ++j) {
    prev[j] = std::max(prev[j - 1], ground(xt[0], xz[0], yt[j], yz[j]));
  }
  for (std::size_t i = 1; i < xt.size(); ++i) {
    const double ti = xt[i], zi = xz[i];
    cur[0] = std::max(prev[0], ground(ti, zi, yt[0], yz[0]));
    for (std::size_t j = 1; j < ny; ++j) {
      const double best = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(best, ground(ti, zi, yt[j], yz[j]));
    }
    std::swap(prev, cur);
  }
  return prev[ny - 1];
}

double m1_oracle_discretization_bound(const StepFunction& x, const StepFunction& y,
                                      int samples_per_segment) {
  if (samples_per_segment < 2) throw std::invalid_argument("need at least 2 samples per segment");
  double longest = 0.0;
  for (const auto* f : {&x, &y}) {
    const Polyline p = polyline(*f);
    for (std::size_t i = 0; i < p.segments(); ++i) {
      longest = std::max(longest, ground(p.t[i], p.z[i], p.t[i + 1], p.z[i + 1]));
    }
  }
  return longest / (samples_per_segment - 1);
}

MetricResult weak_m1_distance(const StepFunction& x, const StepFunction& y, double tol) {
  require_same_dim(x, y);
  MetricResult total;
  for (std::size_t j = 0; j < x.dim(); ++j) {
    const auto r = m1_distance(project(x, j), project(y, j), tol);
    total.value = std::max(total.value, r.value);
    total.lower_bound = std::max(total.lower_bound, r.lower_bound);
    total.upper_bound = std::max(total.upper_bound, r.upper_bound);
    total.refinement_levels += r.refinement_levels;
  }
  return total;
}

double uniform_distance(const StepFunction& x, const StepFunction& y) {
  require_same_dim(x, y);
  const std::size_t d = x.dim();
  auto diff = [&](std::size_t kx, std::size_t ky) {
    const auto a = x.state(kx);
    const auto b = y.state(ky);
    double m = 0.0;
    for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
  };
  std::size_t kx = 0, ky = 0;
  double best = diff(0, 0);
  while (kx < x.jump_count() || ky < y.jump_count()) {
    const double tx = kx < x.jump_count() ? x.jump_time(kx) : 2.0;
    const double ty = ky < y.jump_count() ? y.jump_time(ky) : 2.0;
    const double t = std::min(tx, ty);
    if (tx == t) ++kx;
    if (ty == t) ++ky;
    best = std::max(best, diff(kx, ky));
  }
  return best;
}

double strong_m1_lower_bound(const StepFunction& x, const StepFunction& y,
                             std::span<const double> c, double tol) {
  require_same_dim(x, y);
  const auto cx = linear_combination(x, c);
  const auto cy = linear_combination(y, c);
  double l1 = 0.0;
  for (double v : c) l1 += std::abs(v);
  return m1_distance(cx, cy, tol).lower_bound / std::max(1.0, l1);
}

}  // namespace cadlag
