#ifndef HOPFLAX_ANALYSIS_HPP
#define HOPFLAX_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hopflax/problem.hpp"

namespace hopflax::analysis {

struct GridOptions {
  bool residuals = false;
  // 0 picks the hardware thread count; rows of constant t are the work unit.
  int threads = 1;
};

struct GridPoint {
  Vector x;
  double t = 0.0;
  double v = 0.0;
  Vector alpha;
  Vector v_x;
  double v_t = 0.0;
  double dp_residual = 0.0;
  double dissipation_residual = 0.0;
  bool ok = true;
  std::string error;
};

/// Sweep output. Points are ordered with t slowest and the last state axis
/// fastest, so index = (it * prod(kx) + lex(ix)).
struct GridResult {
  std::vector<std::vector<double>> x_axes;
  std::vector<double> t_grid;
  std::vector<GridPoint> points;
  std::uint64_t digest = 0;
  int n_errors = 0;
};

struct LipschitzEstimate {
  double l_x = 0.0;
  double l_t = 0.0;
};

struct TerminalSample {
  double t = 0.0;
  double delta = 0.0;
  double ratio = 0.0;
};

struct MonotonicityReport {
  bool is_monotone = true;
  double worst_violation = 0.0;
  std::vector<double> alpha;
};

/// Evaluate the value function over the tensor grid. Each constant-t row is
/// solved in sequence with the previous minimizer as warm start; rows may be
/// distributed over threads. A point that throws is recorded with its message
/// and NaN fields; the sweep itself fails only when more than a tenth of the
/// points do.
GridResult grid_eval(const ProblemSpec& spec,
                     const std::vector<std::vector<double>>& x_axes,
                     const std::vector<double>& t_grid,
                     const GridOptions& opts = {});

/// Largest difference quotients along the state axes and along t, taken over
/// adjacent grid points that both evaluated cleanly. NaN when a direction has
/// no usable pair.
LipschitzEstimate lipschitz_estimate(const GridResult& grid);

/// For each t, the gap between v(x,t) and the discounted terminal payoff,
/// normalized by the integrated discount over [t, T].
std::vector<TerminalSample> terminal_convergence(const ProblemSpec& spec,
                                                 const Vector& x,
                                                 const std::vector<double>& ts);

/// Checks that the minimizing velocity is nonincreasing in x along a sorted
/// one-dimensional grid: the candidate cost has nonnegative cross differences
/// in (x, alpha) when the terminal cost is convex, so the lexicographic
/// minimizer moves down as the state moves up. Requires a convex terminal
/// cost with a Hessian; anything else is refused since the ordering is not
/// guaranteed there.
MonotonicityReport alpha_monotonicity(const ProblemSpec& spec, double t,
                                      const std::vector<double>& xs,
                                      double tol = 1e-8);

/// Central second cross-difference of the candidate objective in (x, alpha),
/// nonnegative when the objective is supermodular near the probe point.
double supermodularity_probe(const ProblemSpec& spec, double t, double x,
                             double alpha, double h = 1e-4);

}  // namespace hopflax::analysis

#endif
