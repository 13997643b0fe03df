#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hopflax/errors.hpp"
#include "hopflax/oracle.hpp"
#include "hopflax/problem.hpp"
#include "hopflax/solver.hpp"

using hopflax::ConfigError;
using hopflax::DiscountModel;
using hopflax::DomainError;
using hopflax::LagrangianModel;
using hopflax::Matrix;
using hopflax::ProblemSpec;
using hopflax::TerminalModel;
using hopflax::Vector;
namespace oracle = hopflax::oracle;

namespace {

Vector scalar(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

ProblemSpec exponential_linear(double rate = 1.0) {
  ProblemSpec spec;
  spec.dim = 1;
  spec.horizon = 1.0;
  spec.lagrangian = LagrangianModel::quadratic(Matrix::Identity(1, 1));
  spec.terminal = TerminalModel::linear(scalar(1.0), 0.0);
  spec.discount = DiscountModel::exponential_constant(rate, 1.0);
  return spec;
}

ProblemSpec hyperbolic_huber() {
  ProblemSpec spec;
  spec.dim = 1;
  spec.horizon = 1.0;
  spec.lagrangian = LagrangianModel::quadratic(Matrix::Identity(1, 1));
  spec.terminal = TerminalModel::pseudo_huber(1.0, 1);
  spec.discount = DiscountModel::hyperbolic(1.0, 1.0);
  return spec;
}

}  // namespace

TEST_CASE("arc cost of a single segment is computed by hand") {
  const ProblemSpec spec = exponential_linear();
  const std::vector<Vector> nodes = {scalar(0.0), scalar(1.0)};
  // One unit-width segment: u = 1, midpoint discount e^{-1/2}, endpoint
  // discount e^{-1} on g(1) = 1.
  const double mid = 0.5 * std::exp(-0.5) + std::exp(-1.0);
  CHECK(oracle::arc_cost(spec, 0.0, nodes) ==
        doctest::Approx(mid).epsilon(1e-14));
  const double left = 0.5 + std::exp(-1.0);
  CHECK(oracle::arc_cost(spec, 0.0, nodes, oracle::NodeQuadrature::Left) ==
        doctest::Approx(left).epsilon(1e-14));
}

TEST_CASE("arc cost rejects malformed arcs") {
  const ProblemSpec spec = exponential_linear();
  CHECK_THROWS_AS(oracle::arc_cost(spec, 0.0, {scalar(0.0)}), DomainError);
  CHECK_THROWS_AS(
      oracle::arc_cost(spec, 1.0, {scalar(0.0), scalar(1.0)}), DomainError);
  CHECK_THROWS_AS(
      oracle::arc_cost(spec, 0.0, {Vector::Zero(2), Vector::Zero(2)}),
      DomainError);
}

TEST_CASE("transcription reproduces the undiscounted straight line solution") {
  const ProblemSpec spec = exponential_linear(0.0);
  for (const double x : {-1.0, 0.0, 0.75}) {
    const double direct = x - 0.5;
    CHECK(oracle::transcribe_value(spec, scalar(x), 0.0) ==
          doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("transcription agrees with the solver across discounts") {
  for (const ProblemSpec& spec : {exponential_linear(), hyperbolic_huber()}) {
    for (const double x : {-0.5, 0.0, 1.0}) {
      const double direct = hopf_lax_value(spec, scalar(x), 0.0).v;
      const double grid = oracle::transcribe_value(spec, scalar(x), 0.0);
      CHECK(grid == doctest::Approx(direct).epsilon(1e-5));
    }
  }
}

TEST_CASE("transcription only improves under refinement") {
  const ProblemSpec spec = hyperbolic_huber();
  oracle::TranscriptionConfig coarse;
  coarse.steps = 64;
  oracle::TranscriptionConfig fine;
  fine.steps = 128;
  const double c = oracle::transcribe_value(spec, scalar(1.0), 0.0, coarse);
  const double f = oracle::transcribe_value(spec, scalar(1.0), 0.0, fine);
  CHECK(f <= c + 1e-9);
}

TEST_CASE("transcription at the horizon is the terminal payoff") {
  const ProblemSpec spec = hyperbolic_huber();
  const Vector x = scalar(0.6);
  CHECK(oracle::transcribe_value(spec, x, spec.horizon) ==
        doctest::Approx(spec.terminal.value(x)).epsilon(1e-14));
}

TEST_CASE("backward induction agrees with the solver when it is valid") {
  const ProblemSpec spec = exponential_linear();
  for (const double x : {-0.5, 0.25, 1.0}) {
    const double direct = hopf_lax_value(spec, scalar(x), 0.0).v;
    CHECK(oracle::bellman_value(spec, scalar(x), 0.0) ==
          doctest::Approx(direct).epsilon(1e-6));
  }
  const double direct_t = hopf_lax_value(spec, scalar(0.25), 0.4).v;
  CHECK(oracle::bellman_value(spec, scalar(0.25), 0.4) ==
        doctest::Approx(direct_t).epsilon(1e-6));
}

TEST_CASE("backward induction refuses discounts it cannot restart") {
  CHECK_THROWS_AS(oracle::bellman_value(hyperbolic_huber(), scalar(0.5), 0.0),
                  DomainError);
}

TEST_CASE("forcing the restart under a hyperbolic discount shifts the value") {
  const ProblemSpec spec = hyperbolic_huber();
  const Vector x = scalar(1.0);
  // The naive recursion converges, but to the wrong limit: the planner it
  // simulates re-reads the discount from each step's clock.
  const double naive = oracle::bellman_recursion(spec, x, 0.0);
  CHECK(std::abs(naive - 0.106524887469) <= 1e-3);

  oracle::TranscriptionConfig fine;
  fine.steps = 256;
  const double committed = oracle::transcribe_value(spec, x, 0.0, fine);
  CHECK(committed - naive > 5e-3);
}

TEST_CASE("backward induction validates its grid and query") {
  const ProblemSpec spec = exponential_linear();
  CHECK_THROWS_AS(oracle::bellman_value(spec, scalar(3.0), 0.0), DomainError);
  CHECK_THROWS_AS(oracle::bellman_value(spec, scalar(0.0), 1.5), DomainError);

  oracle::BellmanConfig bad;
  bad.x_count = 1;
  CHECK_THROWS_AS(oracle::bellman_value(spec, scalar(0.0), 0.0, bad),
                  ConfigError);
  bad = {};
  bad.steps = 0;
  CHECK_THROWS_AS(oracle::bellman_value(spec, scalar(0.0), 0.0, bad),
                  ConfigError);
  bad = {};
  bad.x_min = 1.0;
  bad.x_max = -1.0;
  CHECK_THROWS_AS(oracle::bellman_value(spec, scalar(0.0), 0.0, bad),
                  ConfigError);
}
