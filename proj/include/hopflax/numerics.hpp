#ifndef HOPFLAX_NUMERICS_HPP
#define HOPFLAX_NUMERICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "hopflax/errors.hpp"

namespace hopflax::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;
using HessianFn = std::function<Matrix(const Vector&)>;

/// Composite Gauss-Legendre rule: the interval is split into `panels` equal
/// panels, each integrated with a fixed-order rule. Exact for polynomials of
/// degree <= 2*order-1 per panel; abs_tol is the accuracy target the defaults
/// are sized for, the rule itself is not adaptive.
struct QuadratureConfig {
  int panels = 64;
  int order = 8;  // one of 4, 8, 16
  double abs_tol = 1e-10;
};

struct MinimizeConfig {
  double grad_tol = 1e-9;  // max-norm of the gradient at the accepted point
  int max_iter = 200;      // per start
  int multistart = 9;      // lattice points around the warm start
  double radius = 8.0;     // lattice half-width per axis
  double tie_tol = 1e-9;   // values this close to the best count as tied
};

struct FiniteDiffConfig {
  double step = 1e-5;
};

struct MinimizeResult {
  Vector argmin;
  double value = 0.0;
  double grad_norm = 0.0;  // max-norm at argmin
  int iterations = 0;      // summed over all starts
  int starts_used = 0;
  int converged_starts = 0;
  int n_tied = 1;          // candidates within tie_tol of the best value
  double tie_spread = 0.0; // max pairwise distance among tied argmins
};

/// Integral of fn over [t0, t1]. Throws DomainError if t1 < t0 and
/// NonFiniteError if fn evaluates to a non-finite value at any node.
double integrate(const std::function<double(double)>& fn, double t0, double t1,
                 const QuadratureConfig& cfg = {});

/// Unconstrained minimization with a deterministic multistart lattice.
/// Runs damped Newton when `hess` is provided and BFGS otherwise, with Armijo
/// backtracking. Among converged candidates whose values lie within tie_tol of
/// the best, the lexicographically smallest argmin is returned, so repeated
/// runs are bitwise identical. Throws NonConvergence if no start reaches
/// grad_tol within max_iter.
MinimizeResult minimize(const ScalarFn& fn, const GradientFn& grad, int n,
                        const MinimizeConfig& cfg = {},
                        const std::optional<Vector>& warm_start = std::nullopt,
                        const HessianFn& hess = nullptr);

/// Componentwise central-difference gradient estimate.
Vector finite_diff_grad(const ScalarFn& fn, const Vector& x,
                        const FiniteDiffConfig& cfg = {});

}  // namespace hopflax::numerics

#endif
