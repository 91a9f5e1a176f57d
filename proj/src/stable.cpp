#include "cadlag/stable.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cadlag/random.hpp"

namespace cadlag {

namespace {

constexpr double kPi = boost::math::double_constants::pi;
constexpr double kHalfPi = boost::math::double_constants::half_pi;
constexpr double kEulerGamma = boost::math::double_constants::euler;

bool is_one(double alpha) { return std::abs(alpha - 1.0) < 1e-12; }

// Globally adaptive Gauss-Kronrod with an absolute error target; the
// integrands are bounded by 1, so absolute accuracy is what the CDF needs.
double integrate(const auto& f, double a, double b) {
  if (!(b > a)) return 0.0;
  using rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Piece {
    double a, b, value, error;
  };
  auto make = [&](double lo, double hi) {
    double err = 0.0;
    const double v = rule::integrate(f, lo, hi, 0, 0.0, &err);
    return Piece{lo, hi, v, err};
  };
  std::vector<Piece> pieces{make(a, b)};
  constexpr double kAbsTol = 1e-12;
  constexpr std::size_t kMaxPieces = 400;
  for (;;) {
    double total_err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total_err += pieces[i].error;
      if (pieces[i].error > pieces[worst].error) worst = i;
    }
    if (total_err <= kAbsTol || pieces.size() >= kMaxPieces) break;
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    pieces[worst] = make(p.a, mid);
    pieces.push_back(make(mid, p.b));
  }
  double sum = 0.0;
  for (const auto& p : pieces) sum += p.value;
  return sum;
}

/// Integral of exp(-exp(h(theta))) over [a,b], split where h changes sign.
/// h is monotone on (a,b).
template <class H>
double integrate_double_exp(const H& h, double a, double b) {
  auto f = [&](double th) {
    const double e = h(th);
    if (std::isnan(e)) return 0.0;
    if (e > 700.0) return 0.0;
    return std::exp(-std::exp(e));
  };
  const double span = b - a;
  const double ia = a + 1e-12 * span;
  const double ib = b - 1e-12 * span;
  const double ha = h(ia);
  const double hb = h(ib);
  if (!(ha < 0.0 && hb > 0.0) && !(ha > 0.0 && hb < 0.0)) return integrate(f, a, b);
  const bool increasing = ha < hb;
  double lo = ia;
  double hi = ib;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if ((hm < 0.0) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double split = 0.5 * (lo + hi);
  return integrate(f, a, split) + integrate(f, split, b);
}

/// Standard S1 law (scale 1, location 0), alpha != 1, x > 0.
double cdf_positive(double alpha, double beta, double x) {
  const double theta0 = std::atan(beta * std::tan(kHalfPi * alpha)) / alpha;
  const double c1 = alpha < 1.0 ? (kHalfPi - theta0) / kPi : 1.0;
  const double p = alpha / (alpha - 1.0);
  const double log_x = std::log(x);
  const double log_cos_a0 = std::log(std::cos(alpha * theta0)) / (alpha - 1.0);
  auto h = [&](double th) {
    const double cth = std::cos(th);
    const double s = std::sin(alpha * (theta0 + th));
    const double ct = std::cos(alpha * theta0 + (alpha - 1.0) * th);
    return p * log_x + log_cos_a0 + p * (std::log(cth) - std::log(s)) + std::log(ct) -
           std::log(cth);
  };
  const double integral = integrate_double_exp(h, -theta0, kHalfPi);
  const double sign = alpha < 1.0 ? 1.0 : -1.0;
  return std::clamp(c1 + sign * integral / kPi, 0.0, 1.0);
}

double cdf_standard_not_one(double alpha, double beta, double x) {
  if (x == 0.0) {
    const double theta0 = std::atan(beta * std::tan(kHalfPi * alpha)) / alpha;
    return (kHalfPi - theta0) / kPi;
  }
  if (x > 0.0) return cdf_positive(alpha, beta, x);
  return 1.0 - cdf_positive(alpha, -beta, -x);
}

/// Standard S1 law with alpha = 1, beta > 0.
double cdf_one_positive_skew(double beta, double x) {
  const double log_scale = -kPi * x / (2.0 * beta);
  auto h = [&](double th) {
    const double a = kHalfPi + beta * th;
    const double cth = std::cos(th);
    return log_scale + std::log(2.0 / kPi) + std::log(a) - std::log(cth) +
           a * std::tan(th) / beta;
  };
  return std::clamp(integrate_double_exp(h, -kHalfPi, kHalfPi) / kPi, 0.0, 1.0);
}

double cdf_standard_one(double beta, double x) {
  if (std::abs(beta) < 1e-14) return 0.5 + std::atan(x) / kPi;
  if (beta > 0.0) return cdf_one_positive_skew(beta, x);
  return 1.0 - cdf_one_positive_skew(-beta, -x);
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable alpha must lie in (0,2)");
  if (!(skew >= -1.0 && skew <= 1.0)) throw std::invalid_argument("stable skew must lie in [-1,1]");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("stable scale must be positive");
  }
  if (!std::isfinite(location)) throw std::invalid_argument("stable location must be finite");
}

StableParams StableParams::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
  StableParams out = *this;
  out.scale = c * scale;
  out.location = c * location;
  if (is_one(alpha)) out.location -= 2.0 / kPi * skew * scale * c * std::log(c);
  return out;
}

std::vector<double> sample_stable(const StableParams& params, std::size_t count,
                                  std::uint64_t seed) {
  params.validate();
  const double a = params.alpha;
  const double b = params.skew;
  std::vector<double> out(count);
  Stream s(seed);
  if (is_one(a)) {
    const double shift = 2.0 / kPi * b * params.scale * std::log(params.scale) + params.location;
    for (auto& v : out) {
      const double vv = kPi * (s.uniform_open() - 0.5);
      const double w = -std::log(s.uniform_open_closed());
      const double t = kHalfPi + b * vv;
      const double x = 2.0 / kPi * (t * std::tan(vv) - b * std::log(kHalfPi * w * std::cos(vv) / t));
      v = params.scale * x + shift;
    }
    return out;
  }
  const double tan_term = b * std::tan(kHalfPi * a);
  const double bb = std::atan(tan_term) / a;
  const double ss = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * a));
  for (auto& v : out) {
    const double vv = kPi * (s.uniform_open() - 0.5);
    const double w = -std::log(s.uniform_open_closed());
    const double x = ss * std::sin(a * (vv + bb)) / std::pow(std::cos(vv), 1.0 / a) *
                     std::pow(std::cos(vv - a * (vv + bb)) / w, (1.0 - a) / a);
    v = params.scale * x + params.location;
  }
  return out;
}

std::vector<double> sample_stable(double alpha, double skew, double scale, std::size_t count,
                                  std::uint64_t seed) {
  return sample_stable(StableParams{alpha, skew, scale, 0.0}, count, seed);
}

double stable_cdf(const StableParams& params, double x) {
  params.validate();
  if (std::isnan(x)) throw std::invalid_argument("stable_cdf at NaN");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (is_one(params.alpha)) {
    const double shift =
        params.location + 2.0 / kPi * params.skew * params.scale * std::log(params.scale);
    return cdf_standard_one(params.skew, (x - shift) / params.scale);
  }
  return cdf_standard_not_one(params.alpha, params.skew, (x - params.location) / params.scale);
}

Complex2 stable_log_cf(const StableParams& params, double z) {
  params.validate();
  if (z == 0.0) return {0.0, 0.0};
  const double az = std::abs(z);
  const double sg = z > 0.0 ? 1.0 : -1.0;
  if (is_one(params.alpha)) {
    const double re = -params.scale * az;
    const double im = -params.scale * az * params.skew * (2.0 / kPi) * sg * std::log(az) +
                      params.location * z;
    return {re, im};
  }
  const double m = std::pow(params.scale * az, params.alpha);
  return {-m, m * params.skew * sg * std::tan(kHalfPi * params.alpha) + params.location * z};
}

StableParams stable_params_from_levy(double alpha, double c_plus, double c_minus) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable alpha must lie in (0,2)");
  if (!(c_plus >= 0.0 && c_minus >= 0.0 && c_plus + c_minus > 0.0)) {
    throw std::invalid_argument("Levy densities must be nonnegative and not both zero");
  }
  const double total = c_plus + c_minus;
  StableParams p;
  p.alpha = alpha;
  p.skew = (c_plus - c_minus) / total;
  if (is_one(alpha)) {
    p.scale = total * kHalfPi;
    p.location = (c_plus - c_minus) * (1.0 - kEulerGamma);
    return p;
  }
  // -Gamma(-a) cos(pi a / 2), written to stay positive on both sides of a = 1.
  const double k = boost::math::tgamma(1.0 - alpha) / alpha * std::cos(kHalfPi * alpha);
  p.scale = std::pow(total * k, 1.0 / alpha);
  p.location = -(c_plus - c_minus) / (1.0 - alpha);
  return p;
}

StableParams stable_limit_params(double alpha, const ModelConfig& model) {
  switch (model.kind) {
    case ModelKind::iid_pareto:
      return stable_params_from_levy(alpha, alpha, 0.0);
    case ModelKind::iid_symmetric_pareto:
      return stable_params_from_levy(alpha, 0.5 * alpha, 0.5 * alpha);
    case ModelKind::lagged:
      return stable_params_from_levy(alpha, alpha, 0.0).scaled(static_cast<double>(model.q + 1));
    case ModelKind::sre:
      break;
  }
  throw std::invalid_argument("no stable limit parameters for model " + model.name());
}

}  // namespace cadlag
