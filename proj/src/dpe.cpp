#include "hopflax/dpe.hpp"

#include <algorithm>
#include <cmath>

namespace hopflax::dpe {

namespace {

void check_interior(const ProblemSpec& spec, double t) {
  if (!(t > 0.0 && t < spec.horizon))
    throw DomainError("residual checks need 0 < t < horizon");
}

// v at a shifted point, warm-started from the unshifted solution.
double value_at(const ProblemSpec& spec, const Vector& x, double t,
                const Vector& warm) {
  return hopf_lax_value(spec, x, t, warm).v;
}

double central_vt(const ProblemSpec& spec, const Vector& x, double t,
                  const Vector& warm) {
  const double h =
      std::min(spec.finite_diff.step, 0.5 * std::min(t, spec.horizon - t));
  return (value_at(spec, x, t + h, warm) - value_at(spec, x, t - h, warm)) /
         (2.0 * h);
}

Vector central_vx(const ProblemSpec& spec, const Vector& x, double t,
                  const Vector& warm) {
  const double h = spec.finite_diff.step;
  Vector g(spec.dim);
  Vector probe = x;
  for (int i = 0; i < spec.dim; ++i) {
    probe[i] = x[i] + h;
    const double vp = value_at(spec, probe, t, warm);
    probe[i] = x[i] - h;
    const double vm = value_at(spec, probe, t, warm);
    probe[i] = x[i];
    g[i] = (vp - vm) / (2.0 * h);
  }
  return g;
}

}  // namespace

double w_term(const ProblemSpec& spec, const Vector& x, double t,
              const Vector& alpha) {
  if (x.size() != spec.dim || alpha.size() != spec.dim)
    throw DomainError("w_term: dimension mismatch");
  if (!(t >= 0.0 && t < spec.horizon))
    throw DomainError("w_term: t must lie in [0, horizon)");

  const Vector p = spec.lagrangian.gradient(alpha);
  const double running = numerics::integrate(
      [&](double s) {
        const Vector u =
            iota(spec.lagrangian, p / spec.discount.eval(t, s));
        return spec.discount.partial_t(t, s) * spec.lagrangian.value(u);
      },
      t, spec.horizon, spec.quad);

  const Vector y_end = arc_position(spec, t, x, alpha, spec.horizon);
  return running + spec.discount.partial_t(t, spec.horizon) *
                       spec.terminal.value(y_end);
}

double w_tail(const ProblemSpec& spec, double t, double tau, const Vector& y_tau) {
  if (y_tau.size() != spec.dim) throw DomainError("w_tail: dimension mismatch");
  if (!(t >= 0.0 && t < tau && tau <= spec.horizon))
    throw DomainError("w_tail: need 0 <= t < tau <= horizon");

  const double T = spec.horizon;
  if (T - tau <= spec.terminal_eps)
    return (spec.discount.eval(t, T) - 1.0) * spec.terminal.value(y_tau);

  const SolveResult cont = hopf_lax_value(spec, y_tau, tau);
  const Vector p = spec.lagrangian.gradient(cont.alpha);
  const double running = numerics::integrate(
      [&](double s) {
        const Vector u =
            iota(spec.lagrangian, p / spec.discount.eval(tau, s));
        return (spec.discount.eval(t, s) - spec.discount.eval(tau, s)) *
               spec.lagrangian.value(u);
      },
      tau, T, spec.quad);

  const Vector y_end = arc_position(spec, tau, y_tau, cont.alpha, T);
  return running + (spec.discount.eval(t, T) - spec.discount.eval(tau, T)) *
                       spec.terminal.value(y_end);
}

double dp_bracket(const ProblemSpec& spec, const Vector& x, double t, double tau,
                  const Vector& alpha) {
  if (!(t >= 0.0 && t < tau && tau <= spec.horizon))
    throw DomainError("dp_bracket: need 0 <= t < tau <= horizon");

  const Vector p = spec.lagrangian.gradient(alpha);
  const double running = numerics::integrate(
      [&](double s) {
        const Vector u =
            iota(spec.lagrangian, p / spec.discount.eval(t, s));
        return spec.discount.eval(t, s) * spec.lagrangian.value(u);
      },
      t, tau, spec.quad);

  const Vector y_tau = arc_position(spec, t, x, alpha, tau);
  const double v_tau = hopf_lax_value(spec, y_tau, tau, alpha).v;
  return running + v_tau + w_tail(spec, t, tau, y_tau);
}

double dp_identity_residual(const ProblemSpec& spec, const Vector& x, double t,
                            double tau) {
  const SolveResult sol = hopf_lax_value(spec, x, t);
  return sol.v - dp_bracket(spec, x, t, tau, sol.alpha);
}

ResidualReport dp_residual(const ProblemSpec& spec, const Vector& x, double t,
                           DerivativeSource source) {
  check_interior(spec, t);
  const SolveResult sol = hopf_lax_value(spec, x, t);

  ResidualReport rep;
  rep.x = x;
  rep.t = t;
  rep.v = sol.v;
  rep.source = source;
  rep.v_t = central_vt(spec, x, t, sol.alpha);

  if (source == DerivativeSource::Envelope) {
    if (!spec.terminal.gradient)
      throw DomainError("envelope derivatives need a terminal gradient");
    const Vector y_end = arc_position(spec, t, x, sol.alpha, spec.horizon);
    rep.v_x = spec.discount.eval(t, spec.horizon) * spec.terminal.gradient(y_end);
  } else {
    rep.v_x = central_vx(spec, x, t, sol.alpha);
  }

  const Vector alpha_eval = iota(spec.lagrangian, -rep.v_x);
  rep.w_value = w_term(spec, x, t, alpha_eval);
  rep.residual =
      -rep.v_t + conjugate(spec.lagrangian, -rep.v_x) + rep.w_value;
  return rep;
}

double dissipation_residual(const ProblemSpec& spec, const Vector& x, double t) {
  check_interior(spec, t);
  if (spec.discount.kind != DiscountKind::ExponentialRate)
    throw DomainError("dissipation residual applies to exponential-rate discounts only");

  const SolveResult sol = hopf_lax_value(spec, x, t);
  const double v_t = central_vt(spec, x, t, sol.alpha);
  const Vector v_x = central_vx(spec, x, t, sol.alpha);
  return -v_t + conjugate(spec.lagrangian, -v_x) +
         spec.discount.rate(t) * sol.v;
}

double foc_residual(const ProblemSpec& spec, const Vector& x, double t,
                    const Vector& alpha) {
  if (!spec.terminal.gradient)
    throw DomainError("foc_residual needs a terminal gradient");
  if (!(t >= 0.0 && t < spec.horizon))
    throw DomainError("foc_residual: t must lie in [0, horizon)");
  const Vector y_end = arc_position(spec, t, x, alpha, spec.horizon);
  const Vector g = spec.terminal.gradient(y_end);
  return (spec.lagrangian.gradient(alpha) +
          spec.discount.eval(t, spec.horizon) * g)
      .lpNorm<Eigen::Infinity>();
}

}  // namespace hopflax::dpe
