#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hopflax/analysis.hpp"
#include "hopflax/errors.hpp"
#include "hopflax/problem.hpp"

using hopflax::ConfigError;
using hopflax::DiscountModel;
using hopflax::DomainError;
using hopflax::LagrangianModel;
using hopflax::Matrix;
using hopflax::NonConvergence;
using hopflax::ProblemSpec;
using hopflax::TerminalModel;
using hopflax::Vector;
namespace analysis = hopflax::analysis;

namespace {

Vector scalar(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

ProblemSpec classical_linear() {
  ProblemSpec spec;
  spec.dim = 1;
  spec.horizon = 1.0;
  spec.lagrangian = LagrangianModel::quadratic(Matrix::Identity(1, 1));
  spec.terminal = TerminalModel::linear(scalar(1.0), 0.0);
  spec.discount = DiscountModel::exponential_constant(0.0, 1.0);
  return spec;
}

ProblemSpec exponential_linear() {
  ProblemSpec spec = classical_linear();
  spec.discount = DiscountModel::exponential_constant(1.0, 1.0);
  return spec;
}

ProblemSpec hyperbolic_huber() {
  ProblemSpec spec = classical_linear();
  spec.terminal = TerminalModel::pseudo_huber(1.0, 1);
  spec.discount = DiscountModel::hyperbolic(1.0, 1.0);
  return spec;
}

const std::vector<std::vector<double>> kAxes = {{-1.0, -0.5, 0.0, 0.5, 1.0}};
const std::vector<double> kTs = {0.2, 0.5, 0.8};

}  // namespace

TEST_CASE("grid sweep lays points out t slowest, state fastest") {
  const ProblemSpec spec = classical_linear();
  const analysis::GridResult grid = analysis::grid_eval(spec, kAxes, kTs);
  REQUIRE(grid.points.size() == 15);
  CHECK(grid.n_errors == 0);
  for (std::size_t it = 0; it < kTs.size(); ++it) {
    for (std::size_t ix = 0; ix < kAxes[0].size(); ++ix) {
      const analysis::GridPoint& pt = grid.points[it * 5 + ix];
      CHECK(pt.ok);
      CHECK(pt.t == kTs[it]);
      CHECK(pt.x[0] == kAxes[0][ix]);
      const double want = pt.x[0] - 0.5 * (1.0 - pt.t);
      CHECK(pt.v == doctest::Approx(want).epsilon(1e-9));
      CHECK(pt.alpha[0] == doctest::Approx(-1.0).epsilon(1e-7));
    }
  }
}

TEST_CASE("grid digest tracks the sweep inputs") {
  const ProblemSpec spec = classical_linear();
  const analysis::GridResult plain = analysis::grid_eval(spec, kAxes, kTs);
  const analysis::GridResult repeat = analysis::grid_eval(spec, kAxes, kTs);
  CHECK(plain.digest == repeat.digest);

  analysis::GridOptions with_res;
  with_res.residuals = true;
  const analysis::GridResult res =
      analysis::grid_eval(spec, kAxes, kTs, with_res);
  CHECK(res.digest != plain.digest);
}

TEST_CASE("threaded sweeps reproduce the sequential values exactly") {
  const ProblemSpec spec = exponential_linear();
  analysis::GridOptions threaded;
  threaded.threads = 4;
  const analysis::GridResult a = analysis::grid_eval(spec, kAxes, kTs);
  const analysis::GridResult b =
      analysis::grid_eval(spec, kAxes, kTs, threaded);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].v == b.points[i].v);
    CHECK(a.points[i].alpha[0] == b.points[i].alpha[0]);
  }
}

TEST_CASE("residual columns are filled when requested") {
  const ProblemSpec spec = exponential_linear();
  analysis::GridOptions opts;
  opts.residuals = true;
  const analysis::GridResult grid =
      analysis::grid_eval(spec, kAxes, kTs, opts);
  for (const analysis::GridPoint& pt : grid.points) {
    CHECK(std::abs(pt.dp_residual) <= 1e-4);
    CHECK(std::abs(pt.dissipation_residual) <= 1e-4);
    CHECK(std::isfinite(pt.v_t));
    CHECK(pt.v_x.size() == 1);
  }
}

TEST_CASE("a sweep that cannot converge anywhere fails loudly") {
  ProblemSpec spec = exponential_linear();
  spec.minimize.max_iter = 1;
  CHECK_THROWS_AS(analysis::grid_eval(spec, kAxes, kTs), NonConvergence);
}

TEST_CASE("grid inputs are validated") {
  const ProblemSpec spec = classical_linear();
  CHECK_THROWS_AS(analysis::grid_eval(spec, {}, kTs), ConfigError);
  CHECK_THROWS_AS(analysis::grid_eval(spec, {{0.0}, {0.0}}, kTs), ConfigError);
  CHECK_THROWS_AS(analysis::grid_eval(spec, kAxes, {}), ConfigError);
  CHECK_THROWS_AS(analysis::grid_eval(spec, kAxes, {-0.5}), DomainError);
}

TEST_CASE("difference quotients recover the known slopes") {
  const ProblemSpec spec = classical_linear();
  const analysis::GridResult grid = analysis::grid_eval(spec, kAxes, kTs);
  const analysis::LipschitzEstimate lip = analysis::lipschitz_estimate(grid);
  CHECK(lip.l_x == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(lip.l_t == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("terminal gap shrinks at the discount integral's rate") {
  const ProblemSpec spec = exponential_linear();
  const std::vector<double> ts = {0.8, 0.9, 0.95};
  const std::vector<analysis::TerminalSample> samples =
      analysis::terminal_convergence(spec, scalar(0.0), ts);
  REQUIRE(samples.size() == 3);
  for (const analysis::TerminalSample& s : samples) {
    const double tau = spec.horizon - s.t;
    CHECK(s.delta == doctest::Approx(1.0 - std::exp(-tau)).epsilon(1e-10));
    CHECK(s.ratio == doctest::Approx(0.5 * std::exp(-tau)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(analysis::terminal_convergence(spec, scalar(0.0), {1.0}),
                  DomainError);
}

TEST_CASE("a linear terminal makes the minimizer constant in x") {
  const ProblemSpec spec = exponential_linear();
  const analysis::MonotonicityReport report =
      analysis::alpha_monotonicity(spec, 0.3, {-1.0, 0.0, 1.0});
  CHECK(report.is_monotone);
  CHECK(std::abs(report.worst_violation) <= 1e-10);
  CHECK(report.alpha.size() == 3);
  CHECK(report.alpha.front() ==
        doctest::Approx(report.alpha.back()).epsilon(1e-9));
}

TEST_CASE("a curved terminal pushes the minimizer down as x grows") {
  const ProblemSpec spec = hyperbolic_huber();
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(-3.0 + 0.06 * i);
  const analysis::MonotonicityReport report =
      analysis::alpha_monotonicity(spec, 0.5, xs);
  CHECK(report.is_monotone);
  CHECK(report.worst_violation <= 1e-8);
  CHECK(report.alpha.front() > 0.0);
  CHECK(report.alpha.back() < 0.0);
  CHECK(report.alpha.front() > report.alpha.back());
}

TEST_CASE("monotonicity preconditions are enforced") {
  ProblemSpec flat = hyperbolic_huber();
  CHECK_THROWS_AS(analysis::alpha_monotonicity(flat, 0.5, {1.0, 0.0}),
                  DomainError);
  CHECK_THROWS_AS(analysis::alpha_monotonicity(flat, 0.5, {1.0}), ConfigError);

  ProblemSpec wide = hyperbolic_huber();
  wide.dim = 2;
  wide.lagrangian = LagrangianModel::quadratic(Matrix::Identity(2, 2));
  wide.terminal = TerminalModel::pseudo_huber(1.0, 2);
  CHECK_THROWS_AS(analysis::alpha_monotonicity(wide, 0.5, {0.0, 1.0}),
                  DomainError);

  ProblemSpec concave = hyperbolic_huber();
  concave.terminal = TerminalModel::custom(
      1, [](const Vector& x) { return -x.squaredNorm(); },
      [](const Vector& x) { return Vector(-2.0 * x); },
      [](const Vector& x) {
        return Matrix(-2.0 * Matrix::Identity(x.size(), x.size()));
      },
      std::nullopt, false);
  CHECK_THROWS_AS(analysis::alpha_monotonicity(concave, 0.5, {0.0, 1.0}),
                  DomainError);
}

TEST_CASE("cross differences of the candidate cost are nonnegative") {
  const ProblemSpec spec = hyperbolic_huber();
  CHECK(analysis::supermodularity_probe(spec, 0.3, 0.5, -0.5) > 0.0);
  CHECK(analysis::supermodularity_probe(spec, 0.3, 0.0, 0.0) >= -1e-6);
  CHECK_THROWS_AS(analysis::supermodularity_probe(spec, 0.3, 0.0, 0.0, -1.0),
                  DomainError);
}
