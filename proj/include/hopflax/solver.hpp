#ifndef HOPFLAX_SOLVER_HPP
#define HOPFLAX_SOLVER_HPP

#include <optional>

#include "hopflax/problem.hpp"

namespace hopflax {

/// Velocity of the candidate arc with initial velocity alpha: the unique u
/// with grad l(u) = grad l(alpha) / d_t(s). Along such arcs the discounted
/// costate d_t(s) grad l(u(s)) is conserved.
Vector control_profile(const ProblemSpec& spec, double t, const Vector& alpha,
                       double s);

/// Position at time s of the candidate arc started at (x, t).
Vector arc_position(const ProblemSpec& spec, double t, const Vector& x,
                    const Vector& alpha, double s);

/// Discounted running cost of the candidate arc plus discounted terminal
/// payoff at its endpoint.
double objective(const ProblemSpec& spec, const Vector& x, double t,
                 const Vector& alpha);

/// Exact gradient of `objective` in alpha on the same quadrature grid.
/// Requires a terminal gradient.
Vector objective_gradient(const ProblemSpec& spec, const Vector& x, double t,
                          const Vector& alpha);

/// Value at (x, t): minimizes `objective` over the initial velocity. Within
/// terminal_eps of the horizon the value is g(x) and the velocity solves the
/// terminal first-order condition directly.
SolveResult hopf_lax_value(const ProblemSpec& spec, const Vector& x, double t,
                           const std::optional<Vector>& warm_start = std::nullopt);

/// The minimizing arc from (x, t), sampled at `samples` uniform times.
Arc optimal_arc(const ProblemSpec& spec, const Vector& x, double t, int samples);

/// H_t(s, u, p) = p.u - d_t(s) l(u); stationary in u exactly at the
/// candidate-arc velocity for p = grad l(alpha).
double hamiltonian(const ProblemSpec& spec, double t, double s, const Vector& u,
                   const Vector& p);

/// Undiscounted special case: min over endpoints z of
/// (T-t) l((z-x)/(T-t)) + g(z). Requires a constant-one discount.
double classical_hopf_lax(const ProblemSpec& spec, const Vector& x, double t);

}  // namespace hopflax

#endif
