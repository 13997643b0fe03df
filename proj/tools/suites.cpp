#include "suites.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <vector>

#include "hopflax/analysis.hpp"
#include "hopflax/convex.hpp"
#include "hopflax/dpe.hpp"
#include "hopflax/errors.hpp"
#include "hopflax/format.hpp"
#include "hopflax/oracle.hpp"
#include "hopflax/solver.hpp"

namespace hopflax::suites {
namespace {

using format::double_repr;

void add(std::vector<CheckLine>& lines, const std::string& name, bool pass,
         const std::string& detail) {
  lines.push_back({name, pass, detail});
}

void add_skip(std::vector<CheckLine>& lines, const std::string& name,
              const std::string& why) {
  lines.push_back({name, true, "skipped (" + why + ")"});
}

std::vector<Vector> sample_states(int dim) {
  std::vector<Vector> xs;
  xs.push_back(Vector::Zero(dim));
  xs.push_back(Vector::Constant(dim, 0.5));
  xs.push_back(Vector::Constant(dim, -0.75));
  return xs;
}

bool smooth_convex_terminal(const ProblemSpec& spec) {
  return spec.terminal.convex && static_cast<bool>(spec.terminal.hessian);
}

std::vector<CheckLine> oracle_suite(const ProblemSpec& spec) {
  std::vector<CheckLine> lines;
  const double tmax = spec.horizon;
  double worst_gap = 0.0;
  double worst_refine = -1.0;
  for (const Vector& x : sample_states(spec.dim)) {
    for (const double t : {0.0, 0.45 * tmax}) {
      const double v = hopf_lax_value(spec, x, t).v;
      oracle::TranscriptionConfig coarse;
      coarse.steps = 64;
      oracle::TranscriptionConfig fine;
      fine.steps = 128;
      const double tr_coarse = oracle::transcribe_value(spec, x, t, coarse);
      const double tr_fine = oracle::transcribe_value(spec, x, t, fine);
      worst_gap = std::max(worst_gap,
                           std::abs(tr_fine - v) / std::max(1.0, std::abs(v)));
      worst_refine = std::max(worst_refine, tr_fine - tr_coarse);
    }
  }
  add(lines, "transcription agreement", worst_gap <= 2e-3,
      "max relative gap " + double_repr(worst_gap) + " (tol 2e-3)");
  add(lines, "transcription refinement", worst_refine <= 1e-9,
      "max increase under refinement " + double_repr(worst_refine) +
          " (tol 1e-9)");

  if (spec.dim == 1 && spec.discount.kind == DiscountKind::ExponentialRate) {
    const Vector x0 = Vector::Zero(1);
    const double v = hopf_lax_value(spec, x0, 0.0).v;
    const double bell = oracle::bellman_value(spec, x0, 0.0);
    add(lines, "backward induction agreement", std::abs(bell - v) <= 2e-3,
        "|gap| " + double_repr(std::abs(bell - v)) + " (tol 2e-3)");
  } else if (spec.discount.kind != DiscountKind::ExponentialRate) {
    bool refused = false;
    try {
      oracle::bellman_value(spec, Vector::Zero(spec.dim), 0.0);
    } catch (const DomainError&) {
      refused = true;
    }
    add(lines, "backward induction refusal", refused,
        refused ? "non-multiplicative discount refused as required"
                : "refusal did not trigger");
  } else {
    add_skip(lines, "backward induction agreement", "dim > 1");
  }
  return lines;
}

std::vector<CheckLine> residuals_suite(const ProblemSpec& spec) {
  std::vector<CheckLine> lines;
  std::vector<std::vector<double>> axes(
      static_cast<std::size_t>(spec.dim), {-1.0, -0.5, 0.0, 0.5, 1.0});
  std::vector<double> ts;
  for (const double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    ts.push_back(f * spec.horizon);
  }
  analysis::GridOptions opts;
  opts.residuals = true;
  const analysis::GridResult grid = analysis::grid_eval(spec, axes, ts, opts);

  double worst_dp = 0.0;
  double worst_diss = 0.0;
  bool have_diss = false;
  for (const analysis::GridPoint& pt : grid.points) {
    if (!pt.ok) {
      continue;
    }
    if (std::isfinite(pt.dp_residual)) {
      worst_dp = std::max(worst_dp, std::abs(pt.dp_residual));
    }
    if (std::isfinite(pt.dissipation_residual)) {
      worst_diss = std::max(worst_diss, std::abs(pt.dissipation_residual));
      have_diss = true;
    }
  }
  add(lines, "value equation residual", worst_dp <= 1e-4,
      "max |residual| " + double_repr(worst_dp) + " over " +
          std::to_string(grid.points.size()) + " points (tol 1e-4)");
  if (spec.discount.kind == DiscountKind::ExponentialRate) {
    add(lines, "dissipation residual", have_diss && worst_diss <= 1e-4,
        "max |residual| " + double_repr(worst_diss) + " (tol 1e-4)");
  } else {
    add_skip(lines, "dissipation residual",
             "defined for exponential-rate discounts only");
  }

  const Vector x0 = Vector::Constant(spec.dim, 0.5);
  const double mid_res = dpe::dp_identity_residual(
      spec, x0, 0.3 * spec.horizon, 0.6 * spec.horizon);
  if (spec.discount.kind == DiscountKind::ExponentialRate) {
    add(lines, "two-stage identity", std::abs(mid_res) <= 1e-7,
        "|residual| " + double_repr(std::abs(mid_res)) + " (tol 1e-7)");
  } else {
    // Splitting at tau and restarting the discount clock is only exact for
    // multiplicative discounts; otherwise the restart can only lose, by a
    // margin that is second order in the discount mismatch.
    const bool pass = mid_res <= 1e-9 && mid_res >= -1e-3;
    add(lines, "two-stage inequality", pass,
        "residual " + double_repr(mid_res) + " (must lie in [-1e-3, 1e-9])");
  }
  return lines;
}

std::vector<CheckLine> terminal_suite(const ProblemSpec& spec) {
  std::vector<CheckLine> lines;
  if (!spec.terminal.gradient) {
    add_skip(lines, "terminal rate", "terminal cost has no gradient");
    return lines;
  }
  const Vector x = Vector::Constant(spec.dim, 0.25);
  std::vector<double> ts;
  for (const double f : {0.2, 0.1, 0.05, 0.025}) {
    ts.push_back(spec.horizon * (1.0 - f));
  }
  const auto samples = analysis::terminal_convergence(spec, x, ts);
  const double target = conjugate(spec.lagrangian, -spec.terminal.gradient(x));
  const double err_first = std::abs(samples.front().ratio - target);
  const double err_last = std::abs(samples.back().ratio - target);
  add(lines, "terminal rate error shrinks",
      err_last <= 0.5 * err_first + 1e-9,
      "error " + double_repr(err_first) + " -> " + double_repr(err_last));
  add(lines, "terminal rate limit",
      err_last <= 0.05 * std::max(1.0, std::abs(target)),
      "final error " + double_repr(err_last) + ", limit " +
          double_repr(target));
  return lines;
}

std::vector<CheckLine> monotonicity_suite(const ProblemSpec& spec) {
  std::vector<CheckLine> lines;
  if (spec.dim != 1 || !smooth_convex_terminal(spec)) {
    add_skip(lines, "velocity monotonicity",
             "requires dim 1 and a smooth convex terminal cost");
    add_skip(lines, "supermodularity probe",
             "requires dim 1 and a smooth convex terminal cost");
    return lines;
  }
  std::vector<double> xs;
  for (int i = 0; i <= 40; ++i) {
    xs.push_back(-1.5 + 3.0 * i / 40.0);
  }
  const auto report =
      analysis::alpha_monotonicity(spec, 0.3 * spec.horizon, xs);
  add(lines, "velocity monotonicity", report.is_monotone,
      "nonincreasing in x, worst ordering violation " +
          double_repr(report.worst_violation));

  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [px, pa] :
       {std::pair{0.0, 0.0}, {0.5, -0.5}, {-0.5, 0.5}}) {
    const double probe =
        analysis::supermodularity_probe(spec, 0.3 * spec.horizon, px, pa);
    worst = std::min(worst, probe);
  }
  add(lines, "supermodularity probe", worst >= -1e-6,
      "smallest cross difference " + double_repr(worst) + " (tol -1e-6)");
  return lines;
}

std::vector<CheckLine> properties_suite(const ProblemSpec& spec) {
  std::vector<CheckLine> lines;
  const ValidationReport lag = validate_lagrangian(spec.lagrangian);
  add(lines, "lagrangian model", lag.ok, lag.ok ? "validated" : lag.detail);
  const ValidationReport dis = validate_discount(spec.discount);
  add(lines, "discount model", dis.ok, dis.ok ? "validated" : dis.detail);
  const ValidationReport ter = validate_terminal(spec.terminal);
  add(lines, "terminal model", ter.ok, ter.ok ? "validated" : ter.detail);

  double worst_dual = 0.0;
  std::vector<Vector> us;
  us.push_back(Vector::Constant(spec.dim, 0.5));
  us.push_back(Vector::Constant(spec.dim, -1.2));
  {
    Vector alt(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
      alt[i] = (i % 2 == 0) ? 0.3 : -0.3;
    }
    us.push_back(alt);
  }
  for (const Vector& u : us) {
    const Vector p = spec.lagrangian.gradient(u);
    const double gap =
        spec.lagrangian.value(u) + conjugate(spec.lagrangian, p) - p.dot(u);
    worst_dual = std::max(worst_dual, std::abs(gap));
  }
  add(lines, "conjugate duality", worst_dual <= 1e-8,
      "max |equality gap| " + double_repr(worst_dual) + " (tol 1e-8)");

  {
    const double t = 0.3 * spec.horizon;
    const double s = 0.7 * spec.horizon;
    const Vector alpha = Vector::Constant(spec.dim, 0.4);
    const Vector p = spec.lagrangian.gradient(alpha);
    const Vector u_star = control_profile(spec, t, alpha, s);
    const double h = 1e-6;
    double worst = 0.0;
    Vector u = u_star;
    for (int i = 0; i < spec.dim; ++i) {
      u[i] = u_star[i] + h;
      const double hp = hamiltonian(spec, t, s, u, p);
      u[i] = u_star[i] - h;
      const double hm = hamiltonian(spec, t, s, u, p);
      u[i] = u_star[i];
      worst = std::max(worst, std::abs(hp - hm) / (2.0 * h));
    }
    add(lines, "hamiltonian stationarity", worst <= 1e-5,
        "max |dH/du| at the candidate velocity " + double_repr(worst) +
            " (tol 1e-5)");
  }

  {
    const Vector x = Vector::Constant(spec.dim, 0.5);
    const SolveResult sol = hopf_lax_value(spec, x, 0.25 * spec.horizon);
    const bool pass =
        std::isfinite(sol.foc_residual) && sol.foc_residual <= 1e-6;
    add(lines, "first-order condition", pass,
        "residual " + double_repr(sol.foc_residual) + " (tol 1e-6)");
  }

  if (spec.discount.is_constant_one()) {
    double worst = 0.0;
    for (const Vector& x : sample_states(spec.dim)) {
      const double v = hopf_lax_value(spec, x, 0.25 * spec.horizon).v;
      const double c = classical_hopf_lax(spec, x, 0.25 * spec.horizon);
      worst = std::max(worst, std::abs(v - c));
    }
    add(lines, "classical reduction", worst <= 1e-8,
        "max |gap| " + double_repr(worst) + " (tol 1e-8)");
  } else {
    add_skip(lines, "classical reduction", "discount is not constant one");
  }
  return lines;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "oracle", "residuals", "terminal", "monotonicity", "properties"};
  return names;
}

std::vector<CheckLine> run_suite(const ProblemSpec& spec,
                                 const std::string& suite) {
  if (suite == "oracle") {
    return oracle_suite(spec);
  }
  if (suite == "residuals") {
    return residuals_suite(spec);
  }
  if (suite == "terminal") {
    return terminal_suite(spec);
  }
  if (suite == "monotonicity") {
    return monotonicity_suite(spec);
  }
  if (suite == "properties") {
    return properties_suite(spec);
  }
  throw ConfigError("unknown suite '" + suite +
                    "'; expected oracle, residuals, terminal, monotonicity, "
                    "or properties");
}

}  // namespace hopflax::suites
