#ifndef HOPFLAX_DISCOUNT_HPP
#define HOPFLAX_DISCOUNT_HPP

#include <functional>
#include <vector>

#include "hopflax/errors.hpp"
#include "hopflax/numerics.hpp"
#include "hopflax/validation.hpp"

namespace hopflax {

enum class DiscountKind { ExponentialRate, ElapsedTime, Custom };

/// Two-argument discount factor d_t(s) on the triangle 0 <= t <= s <= T with
/// d_t(t) = 1 and values in (lower_bound, 1].
///
/// ExponentialRate: d_t(s) = exp(-int_t^s rate), which is multiplicative in
/// intermediate times. ElapsedTime: d_t(s) = theta(s - t), which in general is
/// not, so optimal plans recomputed at later times disagree with the original
/// plan (time inconsistency).
struct DiscountModel {
  DiscountKind kind = DiscountKind::Custom;
  double horizon = 0.0;
  double lower_bound = 0.0;

  // ExponentialRate: rate(t) >= 0 and its exact antiderivative R(t) = int_0^t rate.
  std::function<double(double)> rate;
  std::function<double(double)> rate_integral;

  // ElapsedTime: theta is C^1 on [0, T] with theta(0) = 1.
  std::function<double(double)> theta;
  std::function<double(double)> theta_prime;

  // Custom: d(t, s) and its partial derivative in t.
  std::function<double(double, double)> d_fn;
  std::function<double(double, double)> ddt_fn;

  double eval(double t, double s) const;
  double partial_t(double t, double s) const;
  bool is_constant_one() const;

  /// Nonnegative continuous rate given as a callback; the antiderivative is
  /// tabulated once at construction so evaluation stays read-only.
  static DiscountModel exponential_rate(std::function<double(double)> rate,
                                        double horizon,
                                        const numerics::QuadratureConfig& quad = {});
  static DiscountModel exponential_constant(double rate, double horizon);
  static DiscountModel exponential_piecewise_linear(std::vector<double> breakpoints,
                                                    std::vector<double> values,
                                                    double horizon);

  /// theta(tau) = 1 / (1 + k tau).
  static DiscountModel hyperbolic(double k, double horizon);
  static DiscountModel elapsed_time(std::function<double(double)> theta,
                                    std::function<double(double)> theta_prime,
                                    double horizon);

  static DiscountModel custom(std::function<double(double, double)> d,
                              std::function<double(double, double)> ddt,
                              double horizon, double lower_bound);
};

ValidationReport validate_discount(const DiscountModel& model, int samples = 64,
                                   unsigned seed = 20240613);

}  // namespace hopflax

#endif
