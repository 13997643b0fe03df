#ifndef HOPFLAX_PROBLEM_HPP
#define HOPFLAX_PROBLEM_HPP

#include <Eigen/Dense>
#include <vector>

#include "hopflax/convex.hpp"
#include "hopflax/discount.hpp"
#include "hopflax/numerics.hpp"
#include "hopflax/terminal.hpp"

namespace hopflax {

/// One variational problem instance: minimize the discounted running cost of
/// an arc plus its discounted terminal payoff over the horizon [0, T].
struct ProblemSpec {
  int dim = 1;
  double horizon = 1.0;

  LagrangianModel lagrangian;
  TerminalModel terminal;
  DiscountModel discount;

  numerics::QuadratureConfig quad;
  numerics::MinimizeConfig minimize;
  numerics::FiniteDiffConfig finite_diff;

  // Horizon gaps below this are treated as the terminal time itself.
  double terminal_eps = 1e-7;
};

/// Throws DomainError when dimensions or horizons disagree.
void validate_spec(const ProblemSpec& spec);

struct SolveResult {
  double v = 0.0;
  Vector alpha;          // optimal initial velocity
  Vector p;              // grad l(alpha), the conserved costate
  double foc_residual = 0.0;  // NaN when the terminal has no gradient
  int starts_used = 0;
  int iterations = 0;
  int n_tied = 1;
  double tie_spread = 0.0;
};

struct Arc {
  std::vector<double> times;
  std::vector<Vector> positions;
  std::vector<Vector> velocities;
  double cost = 0.0;  // recomputed discounted total along the arc
};

}  // namespace hopflax

#endif
