#ifndef HOPFLAX_DPE_HPP
#define HOPFLAX_DPE_HPP

#include "hopflax/solver.hpp"

namespace hopflax::dpe {

enum class DerivativeSource { FiniteDiff, Envelope };

/// One pointwise check of the value equation -v_t + l*(-v_x) + w = 0.
struct ResidualReport {
  Vector x;
  double t = 0.0;
  double v = 0.0;
  Vector v_x;
  double v_t = 0.0;
  double w_value = 0.0;
  double residual = 0.0;
  DerivativeSource source = DerivativeSource::FiniteDiff;
};

/// Sensitivity of the candidate-arc cost to the clock the discount is read
/// from: int_t^T (dd_t/dt)(s) l(u(s)) ds + (dd_t/dt)(T) g(y(T)). For
/// exponential-rate discounts this is exactly rate(t) times the objective.
double w_term(const ProblemSpec& spec, const Vector& x, double t,
              const Vector& alpha);

/// Cost, discounted from time t, of following the optimal continuation from
/// (y_tau, tau) minus that continuation's own value; zero whenever the
/// discount is multiplicative.
double w_tail(const ProblemSpec& spec, double t, double tau, const Vector& y_tau);

/// Running cost to tau along the candidate arc, plus the value at its
/// endpoint, plus the tail correction. Never smaller than v(x, t). With a
/// multiplicative discount the optimal alpha attains equality; otherwise
/// restarting the clock at tau loses a margin that is second order in the
/// discount mismatch.
double dp_bracket(const ProblemSpec& spec, const Vector& x, double t, double tau,
                  const Vector& alpha);

/// v(x, t) minus the bracket evaluated at the optimal alpha: zero for
/// multiplicative discounts, nonpositive in general.
double dp_identity_residual(const ProblemSpec& spec, const Vector& x, double t,
                            double tau);

/// Pointwise residual of -v_t + l*(-v_x) + w(x, t, iota(-v_x)) = 0, with v_x
/// taken from central differences or from the terminal gradient along the
/// optimal arc (envelope identity).
ResidualReport dp_residual(const ProblemSpec& spec, const Vector& x, double t,
                           DerivativeSource source = DerivativeSource::FiniteDiff);

/// Exponential-rate discounts only: residual of -v_t + l*(-v_x) + rate(t) v = 0.
double dissipation_residual(const ProblemSpec& spec, const Vector& x, double t);

/// Max-norm of grad l(alpha) + d_t(T) grad g(y(T)) along the candidate arc.
double foc_residual(const ProblemSpec& spec, const Vector& x, double t,
                    const Vector& alpha);

}  // namespace hopflax::dpe

#endif
