#include "hopflax/discount.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

namespace hopflax {

namespace {

void check_triangle(double t, double s, double horizon) {
  if (t < 0.0 || t > s || s > horizon) {
    std::ostringstream os;
    os << "discount: (t, s) = (" << t << ", " << s
       << ") outside 0 <= t <= s <= " << horizon;
    throw DomainError(os.str());
  }
}

// Single-panel order-8 Gauss-Legendre, used for the antiderivative table and
// its partial-panel tails.
double gl8(const std::function<double(double)>& fn, double a, double b) {
  static const double kN[] = {0.18343464249564980494, 0.52553240991632898582,
                              0.79666647741362673959, 0.96028985649753623168};
  static const double kW[] = {0.36268378337836198297, 0.31370664587788728734,
                              0.22238103445337447054, 0.10122853629037625915};
  const double mid = 0.5 * (a + b);
  const double scale = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    acc += kW[i] * (fn(mid - scale * kN[i]) + fn(mid + scale * kN[i]));
  return scale * acc;
}

}  // namespace

double DiscountModel::eval(double t, double s) const {
  check_triangle(t, s, horizon);
  switch (kind) {
    case DiscountKind::ExponentialRate:
      return std::exp(rate_integral(t) - rate_integral(s));
    case DiscountKind::ElapsedTime:
      return theta(s - t);
    case DiscountKind::Custom:
      return d_fn(t, s);
  }
  throw DomainError("discount: unknown kind");
}

double DiscountModel::partial_t(double t, double s) const {
  check_triangle(t, s, horizon);
  switch (kind) {
    case DiscountKind::ExponentialRate:
      return rate(t) * std::exp(rate_integral(t) - rate_integral(s));
    case DiscountKind::ElapsedTime:
      return -theta_prime(s - t);
    case DiscountKind::Custom:
      return ddt_fn(t, s);
  }
  throw DomainError("discount: unknown kind");
}

bool DiscountModel::is_constant_one() const {
  return kind == DiscountKind::ExponentialRate && lower_bound >= 1.0 - 1e-15;
}

DiscountModel DiscountModel::exponential_rate(std::function<double(double)> rate,
                                              double horizon,
                                              const numerics::QuadratureConfig& quad) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  if (!rate) throw DomainError("discount: rate callback is required");

  // Cumulative panel integrals; a partial panel is finished with one more
  // Gauss pass, so R is smooth in t and exactly zero at t = 0.
  const int panels = std::max(256, quad.panels);
  auto table = std::make_shared<std::vector<double>>(panels + 1, 0.0);
  const double width = horizon / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    (*table)[p + 1] = (*table)[p] + gl8(rate, a, a + width);
    if (!std::isfinite((*table)[p + 1]))
      throw NonFiniteError("discount: rate integral is non-finite");
  }

  DiscountModel m;
  m.kind = DiscountKind::ExponentialRate;
  m.horizon = horizon;
  m.rate = rate;
  m.rate_integral = [table, rate, width, panels, horizon](double t) {
    const double clamped = std::min(std::max(t, 0.0), horizon);
    int p = std::min(static_cast<int>(clamped / width), panels - 1);
    const double a = p * width;
    return (*table)[p] + gl8(rate, a, clamped);
  };
  m.lower_bound = std::exp(-m.rate_integral(horizon));
  return m;
}

DiscountModel DiscountModel::exponential_constant(double rate, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  if (!(rate >= 0.0)) throw DomainError("discount: rate must be >= 0");
  DiscountModel m;
  m.kind = DiscountKind::ExponentialRate;
  m.horizon = horizon;
  m.rate = [rate](double) { return rate; };
  m.rate_integral = [rate](double t) { return rate * t; };
  m.lower_bound = std::exp(-rate * horizon);
  return m;
}

DiscountModel DiscountModel::exponential_piecewise_linear(
    std::vector<double> breakpoints, std::vector<double> values, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  const size_t k = breakpoints.size();
  if (k < 2 || values.size() != k)
    throw DomainError("discount: rate table needs matching breakpoints/values, length >= 2");
  for (size_t i = 0; i + 1 < k; ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw DomainError("discount: rate breakpoints must be strictly increasing");
  if (breakpoints.front() > 0.0 || breakpoints.back() < horizon - 1e-12)
    throw DomainError("discount: rate table must cover [0, horizon]");
  for (double v : values)
    if (!(v >= 0.0)) throw DomainError("discount: rate values must be >= 0");

  // Exact piecewise-quadratic antiderivative of the interpolant.
  auto bp = std::make_shared<std::vector<double>>(std::move(breakpoints));
  auto vv = std::make_shared<std::vector<double>>(std::move(values));
  auto cum = std::make_shared<std::vector<double>>(k, 0.0);
  for (size_t i = 0; i + 1 < k; ++i)
    (*cum)[i + 1] = (*cum)[i] + 0.5 * ((*vv)[i] + (*vv)[i + 1]) *
                                    ((*bp)[i + 1] - (*bp)[i]);

  auto segment = [bp](double t) {
    size_t i = std::upper_bound(bp->begin(), bp->end(), t) - bp->begin();
    if (i > 0) --i;
    return std::min(i, bp->size() - 2);
  };
  auto rate_fn = [bp, vv, segment](double t) {
    const size_t i = segment(t);
    const double w = ((*bp)[i + 1] - (*bp)[i]);
    const double lam = std::min(std::max((t - (*bp)[i]) / w, 0.0), 1.0);
    return (1.0 - lam) * (*vv)[i] + lam * (*vv)[i + 1];
  };
  auto integral_fn = [bp, vv, cum, segment, rate_fn](double t) {
    const size_t i = segment(t);
    const double dt = t - (*bp)[i];
    return (*cum)[i] + 0.5 * ((*vv)[i] + rate_fn(t)) * dt;
  };

  DiscountModel m;
  m.kind = DiscountKind::ExponentialRate;
  m.horizon = horizon;
  m.rate = rate_fn;
  m.rate_integral = integral_fn;
  m.lower_bound = std::exp(-integral_fn(horizon));
  return m;
}

DiscountModel DiscountModel::hyperbolic(double k, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  if (!(k > 0.0)) throw DomainError("discount: hyperbolic k must be > 0");
  DiscountModel m;
  m.kind = DiscountKind::ElapsedTime;
  m.horizon = horizon;
  m.theta = [k](double tau) { return 1.0 / (1.0 + k * tau); };
  m.theta_prime = [k](double tau) {
    const double den = 1.0 + k * tau;
    return -k / (den * den);
  };
  m.lower_bound = 1.0 / (1.0 + k * horizon);
  return m;
}

DiscountModel DiscountModel::elapsed_time(std::function<double(double)> theta,
                                          std::function<double(double)> theta_prime,
                                          double horizon) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  if (!theta || !theta_prime)
    throw DomainError("discount: theta and theta_prime are required");
  if (std::abs(theta(0.0) - 1.0) > 1e-12)
    throw DomainError("discount: theta(0) must equal 1");

  double lo = 1.0;
  for (int i = 0; i <= 4096; ++i) {
    const double v = theta(horizon * i / 4096.0);
    if (!std::isfinite(v) || v <= 0.0 || v > 1.0 + 1e-12)
      throw DomainError("discount: theta must take values in (0, 1]");
    lo = std::min(lo, v);
  }

  DiscountModel m;
  m.kind = DiscountKind::ElapsedTime;
  m.horizon = horizon;
  m.theta = std::move(theta);
  m.theta_prime = std::move(theta_prime);
  m.lower_bound = lo;
  return m;
}

DiscountModel DiscountModel::custom(std::function<double(double, double)> d,
                                    std::function<double(double, double)> ddt,
                                    double horizon, double lower_bound) {
  if (!(horizon > 0.0)) throw DomainError("discount: horizon must be > 0");
  if (!d || !ddt) throw DomainError("discount: d and ddt callbacks are required");
  if (!(lower_bound > 0.0 && lower_bound <= 1.0))
    throw DomainError("discount: lower_bound must lie in (0, 1]");
  for (int i = 0; i <= 16; ++i) {
    const double t = horizon * i / 16.0;
    if (std::abs(d(t, t) - 1.0) > 1e-12)
      throw DomainError("discount: custom d must satisfy d_t(t) = 1");
  }
  DiscountModel m;
  m.kind = DiscountKind::Custom;
  m.horizon = horizon;
  m.lower_bound = lower_bound;
  m.d_fn = std::move(d);
  m.ddt_fn = std::move(ddt);
  return m;
}

ValidationReport validate_discount(const DiscountModel& model, int samples,
                                   unsigned seed) {
  ValidationReport rep;
  std::ostringstream os;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double T = model.horizon;

  for (int i = 0; i < samples; ++i) {
    const double t = unif(rng) * T;
    const double s = t + unif(rng) * (T - t);

    const double one = model.eval(t, t);
    if (std::abs(one - 1.0) > 1e-12) {
      rep.ok = false;
      os << "d_t(t) != 1 at t = " << t << "; ";
    }

    const double d = model.eval(t, s);
    if (!(d > 0.0 && d <= 1.0 + 1e-12) || d < model.lower_bound - 1e-9) {
      rep.ok = false;
      os << "d out of (lower_bound, 1] at (" << t << ", " << s << "); ";
    }

    // partial_t against central differences, at points where the stencil
    // stays inside the triangle.
    const double h = 1e-5;
    if (t - h >= 0.0 && t + h <= s) {
      const double fd = (model.eval(t + h, s) - model.eval(t - h, s)) / (2.0 * h);
      const double an = model.partial_t(t, s);
      if (std::abs(fd - an) > 1e-5 * (1.0 + std::abs(an))) {
        rep.ok = false;
        os << "partial_t mismatch at (" << t << ", " << s << "): fd " << fd
           << " vs " << an << "; ";
      }
    }
  }

  rep.detail = os.str();
  return rep;
}

}  // namespace hopflax
