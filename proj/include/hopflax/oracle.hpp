#ifndef HOPFLAX_ORACLE_HPP
#define HOPFLAX_ORACLE_HPP

#include <vector>

#include "hopflax/problem.hpp"

namespace hopflax::oracle {

enum class NodeQuadrature { Left, Midpoint };

/// Direct transcription settings: arcs are piecewise linear on `steps` equal
/// intervals and their discretized cost is minimized over all interior nodes.
struct TranscriptionConfig {
  int steps = 128;
  NodeQuadrature node_quadrature = NodeQuadrature::Midpoint;
  numerics::MinimizeConfig minimize;

  TranscriptionConfig() {
    minimize.grad_tol = 1e-8;
    minimize.max_iter = 2000;
    minimize.multistart = 1;
  }
};

struct BellmanConfig {
  double x_min = -2.0;
  double x_max = 2.0;
  int x_count = 401;
  int steps = 200;
};

/// Discretized discounted cost of the piecewise-linear arc through `nodes`
/// (positions at uniform times from t to the horizon): per-interval discount
/// factor times Lagrangian of the interval velocity, plus the discounted
/// terminal payoff at the last node.
double arc_cost(const ProblemSpec& spec, double t,
                const std::vector<Vector>& nodes,
                NodeQuadrature node_quadrature = NodeQuadrature::Midpoint);

/// Minimum of `arc_cost` over the interior nodes, warm-started from both the
/// solver's optimal arc and the constant arc, keeping the smaller result.
/// Shares nothing with the solver's own formula beyond the model callbacks.
double transcribe_value(const ProblemSpec& spec, const Vector& x, double t,
                        const TranscriptionConfig& cfg = {});

/// Backward induction on a state grid (dim 1). Only sound when the discount
/// is multiplicative, i.e. exponential-rate; anything else is refused.
double bellman_value(const ProblemSpec& spec, const Vector& x, double t,
                     const BellmanConfig& cfg = {});

/// The same recursion without the multiplicativity guard. For a
/// non-multiplicative discount every step re-reads the discount from its own
/// clock, which is exactly the naive scheme that disagrees with the
/// committed-plan value; exposed so that disagreement can be demonstrated.
double bellman_recursion(const ProblemSpec& spec, const Vector& x, double t,
                         const BellmanConfig& cfg = {});

}  // namespace hopflax::oracle

#endif
