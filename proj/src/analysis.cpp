#include "hopflax/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <thread>

#include "hopflax/convex.hpp"
#include "hopflax/dpe.hpp"
#include "hopflax/errors.hpp"
#include "hopflax/solver.hpp"

namespace hopflax::analysis {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv_mix(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv_double(std::uint64_t h, double d) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &d, sizeof(bits));
  return fnv_mix(h, &bits, sizeof(bits));
}

std::uint64_t grid_digest(const ProblemSpec& spec,
                          const std::vector<std::vector<double>>& x_axes,
                          const std::vector<double>& t_grid, bool residuals) {
  std::uint64_t h = 1469598103934665603ull;
  const std::uint64_t dim = static_cast<std::uint64_t>(spec.dim);
  h = fnv_mix(h, &dim, sizeof(dim));
  h = fnv_double(h, spec.horizon);
  for (const auto& axis : x_axes) {
    const std::uint64_t k = axis.size();
    h = fnv_mix(h, &k, sizeof(k));
    for (double v : axis) {
      h = fnv_double(h, v);
    }
  }
  const std::uint64_t kt = t_grid.size();
  h = fnv_mix(h, &kt, sizeof(kt));
  for (double v : t_grid) {
    h = fnv_double(h, v);
  }
  const unsigned char flag = residuals ? 1 : 0;
  return fnv_mix(h, &flag, sizeof(flag));
}

double value_at(const ProblemSpec& spec, const Vector& x, double t,
                const std::optional<Vector>& warm) {
  return hopf_lax_value(spec, x, t, warm).v;
}

// Time derivative by central difference where the stencil fits, otherwise a
// second-order one-sided stencil toward the interior.
double time_derivative(const ProblemSpec& spec, const Vector& x, double t,
                       const Vector& warm) {
  const double tmax = spec.horizon;
  double h = spec.finite_diff.step;
  const std::optional<Vector> w(warm);
  if (t - h >= 0.0 && t + h <= tmax) {
    return (value_at(spec, x, t + h, w) - value_at(spec, x, t - h, w)) /
           (2.0 * h);
  }
  h = std::min(h, 0.5 * tmax);
  if (t + 2.0 * h <= tmax) {
    const double v0 = value_at(spec, x, t, w);
    const double v1 = value_at(spec, x, t + h, w);
    const double v2 = value_at(spec, x, t + 2.0 * h, w);
    return (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h);
  }
  const double v0 = value_at(spec, x, t, w);
  const double v1 = value_at(spec, x, t - h, w);
  const double v2 = value_at(spec, x, t - 2.0 * h, w);
  return (3.0 * v0 - 4.0 * v1 + v2) / (2.0 * h);
}

Vector state_gradient(const ProblemSpec& spec, const Vector& x, double t,
                      const SolveResult& sol) {
  if (spec.terminal.gradient) {
    const double d_end = spec.discount.eval(t, spec.horizon);
    const Vector y_end = arc_position(spec, t, x, sol.alpha, spec.horizon);
    return d_end * spec.terminal.gradient(y_end);
  }
  const double h = spec.finite_diff.step;
  const std::optional<Vector> w(sol.alpha);
  Vector g(spec.dim);
  Vector shifted = x;
  for (int a = 0; a < spec.dim; ++a) {
    shifted[a] = x[a] + h;
    const double vp = value_at(spec, shifted, t, w);
    shifted[a] = x[a] - h;
    const double vm = value_at(spec, shifted, t, w);
    shifted[a] = x[a];
    g[a] = (vp - vm) / (2.0 * h);
  }
  return g;
}

}  // namespace

GridResult grid_eval(const ProblemSpec& spec,
                     const std::vector<std::vector<double>>& x_axes,
                     const std::vector<double>& t_grid,
                     const GridOptions& opts) {
  validate_spec(spec);
  if (static_cast<int>(x_axes.size()) != spec.dim) {
    throw ConfigError("grid needs one state axis per dimension");
  }
  std::size_t n_x = 1;
  for (const auto& axis : x_axes) {
    if (axis.empty()) {
      throw ConfigError("grid axes must be non-empty");
    }
    for (double v : axis) {
      if (!std::isfinite(v)) {
        throw DomainError("grid axes must be finite");
      }
    }
    n_x *= axis.size();
  }
  if (t_grid.empty()) {
    throw ConfigError("grid needs at least one t value");
  }
  for (double t : t_grid) {
    if (!std::isfinite(t) || t < 0.0 || t > spec.horizon) {
      throw DomainError("grid t values must lie in [0, horizon]");
    }
  }

  GridResult result;
  result.x_axes = x_axes;
  result.t_grid = t_grid;
  result.digest = grid_digest(spec, x_axes, t_grid, opts.residuals);
  result.points.resize(t_grid.size() * n_x);

  const int n_axes = static_cast<int>(x_axes.size());
  auto run_row = [&](std::size_t it) {
    const double t = t_grid[it];
    std::vector<std::size_t> idx(static_cast<std::size_t>(n_axes), 0);
    std::optional<Vector> warm;
    Vector xv(spec.dim);
    for (std::size_t j = 0; j < n_x; ++j) {
      for (int a = 0; a < n_axes; ++a) {
        xv[a] = x_axes[static_cast<std::size_t>(a)]
                      [idx[static_cast<std::size_t>(a)]];
      }
      GridPoint& pt = result.points[it * n_x + j];
      pt.x = xv;
      pt.t = t;
      try {
        const SolveResult sol = hopf_lax_value(spec, xv, t, warm);
        warm = sol.alpha;
        pt.v = sol.v;
        pt.alpha = sol.alpha;
        pt.v_x = state_gradient(spec, xv, t, sol);
        pt.v_t = time_derivative(spec, xv, t, sol.alpha);
        pt.dp_residual = kNaN;
        pt.dissipation_residual = kNaN;
        if (opts.residuals && spec.horizon - t > spec.terminal_eps) {
          const Vector alpha_eval = iota(spec.lagrangian, -pt.v_x);
          const double conj = conjugate(spec.lagrangian, -pt.v_x);
          pt.dp_residual =
              -pt.v_t + conj + dpe::w_term(spec, xv, t, alpha_eval);
          if (spec.discount.kind == DiscountKind::ExponentialRate &&
              spec.discount.rate) {
            pt.dissipation_residual =
                -pt.v_t + conj + spec.discount.rate(t) * pt.v;
          }
        }
      } catch (const std::exception& e) {
        pt.ok = false;
        pt.error = e.what();
        pt.v = kNaN;
        pt.alpha = Vector::Constant(spec.dim, kNaN);
        pt.v_x = Vector::Constant(spec.dim, kNaN);
        pt.v_t = kNaN;
        pt.dp_residual = kNaN;
        pt.dissipation_residual = kNaN;
      }
      for (int a = n_axes - 1; a >= 0; --a) {
        auto& ia = idx[static_cast<std::size_t>(a)];
        if (++ia < x_axes[static_cast<std::size_t>(a)].size()) {
          break;
        }
        ia = 0;
      }
    }
  };

  const std::size_t n_rows = t_grid.size();
  int want = opts.threads;
  if (want <= 0) {
    want = static_cast<int>(std::thread::hardware_concurrency());
  }
  want = std::clamp(want, 1, static_cast<int>(n_rows));
  if (want == 1) {
    for (std::size_t it = 0; it < n_rows; ++it) {
      run_row(it);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(want));
    for (int w = 0; w < want; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t it = next.fetch_add(1);
          if (it >= n_rows) {
            return;
          }
          run_row(it);
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  for (const GridPoint& pt : result.points) {
    if (!pt.ok) {
      ++result.n_errors;
    }
  }
  if (10 * static_cast<std::size_t>(result.n_errors) > result.points.size()) {
    throw NonConvergence("more than a tenth of the grid points failed",
                         kNaN, kNaN, 0);
  }
  return result;
}

LipschitzEstimate lipschitz_estimate(const GridResult& grid) {
  const int n_axes = static_cast<int>(grid.x_axes.size());
  std::size_t n_x = 1;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_axes));
  for (int a = 0; a < n_axes; ++a) {
    sizes[static_cast<std::size_t>(a)] =
        grid.x_axes[static_cast<std::size_t>(a)].size();
    n_x *= sizes[static_cast<std::size_t>(a)];
  }
  std::vector<std::size_t> stride(static_cast<std::size_t>(n_axes), 1);
  for (int a = n_axes - 2; a >= 0; --a) {
    stride[static_cast<std::size_t>(a)] =
        stride[static_cast<std::size_t>(a) + 1] *
        sizes[static_cast<std::size_t>(a) + 1];
  }

  LipschitzEstimate est;
  bool has_x = false;
  bool has_t = false;
  est.l_x = 0.0;
  est.l_t = 0.0;
  const std::size_t n_t = grid.t_grid.size();
  for (std::size_t it = 0; it < n_t; ++it) {
    for (std::size_t j = 0; j < n_x; ++j) {
      const GridPoint& p0 = grid.points[it * n_x + j];
      if (!p0.ok) {
        continue;
      }
      for (int a = 0; a < n_axes; ++a) {
        const std::size_t ia =
            (j / stride[static_cast<std::size_t>(a)]) %
            sizes[static_cast<std::size_t>(a)];
        if (ia + 1 >= sizes[static_cast<std::size_t>(a)]) {
          continue;
        }
        const GridPoint& p1 =
            grid.points[it * n_x + j + stride[static_cast<std::size_t>(a)]];
        if (!p1.ok) {
          continue;
        }
        const double dx = grid.x_axes[static_cast<std::size_t>(a)][ia + 1] -
                          grid.x_axes[static_cast<std::size_t>(a)][ia];
        if (dx == 0.0) {
          continue;
        }
        est.l_x = std::max(est.l_x, std::abs(p1.v - p0.v) / std::abs(dx));
        has_x = true;
      }
      if (it + 1 < n_t) {
        const GridPoint& p1 = grid.points[(it + 1) * n_x + j];
        const double dt = grid.t_grid[it + 1] - grid.t_grid[it];
        if (p1.ok && dt != 0.0) {
          est.l_t = std::max(est.l_t, std::abs(p1.v - p0.v) / std::abs(dt));
          has_t = true;
        }
      }
    }
  }
  if (!has_x) {
    est.l_x = kNaN;
  }
  if (!has_t) {
    est.l_t = kNaN;
  }
  return est;
}

std::vector<TerminalSample> terminal_convergence(
    const ProblemSpec& spec, const Vector& x, const std::vector<double>& ts) {
  std::vector<TerminalSample> out;
  out.reserve(ts.size());
  std::optional<Vector> warm;
  for (double t : ts) {
    if (!(t >= 0.0) || !(t < spec.horizon)) {
      throw DomainError("terminal convergence samples need 0 <= t < horizon");
    }
    const SolveResult sol = hopf_lax_value(spec, x, t, warm);
    warm = sol.alpha;
    const double delta = numerics::integrate(
        [&](double s) { return spec.discount.eval(t, s); }, t, spec.horizon,
        spec.quad);
    const double payoff =
        spec.discount.eval(t, spec.horizon) * spec.terminal.value(x);
    TerminalSample sample;
    sample.t = t;
    sample.delta = delta;
    sample.ratio = std::abs(sol.v - payoff) / delta;
    out.push_back(sample);
  }
  return out;
}

MonotonicityReport alpha_monotonicity(const ProblemSpec& spec, double t,
                                      const std::vector<double>& xs,
                                      double tol) {
  if (spec.dim != 1) {
    throw DomainError("monotonicity check supports dim == 1 only");
  }
  if (!spec.terminal.convex || !spec.terminal.hessian) {
    throw DomainError(
        "monotonicity of the minimizer is only guaranteed for a convex "
        "terminal cost with a Hessian");
  }
  if (xs.size() < 2) {
    throw ConfigError("monotonicity check needs at least two states");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw DomainError("monotonicity states must be strictly increasing");
    }
  }
  MonotonicityReport report;
  report.alpha.reserve(xs.size());
  std::optional<Vector> warm;
  Vector xv(1);
  for (double x : xs) {
    xv[0] = x;
    const SolveResult sol = hopf_lax_value(spec, xv, t, warm);
    warm = sol.alpha;
    report.alpha.push_back(sol.alpha[0]);
  }
  for (std::size_t i = 1; i < report.alpha.size(); ++i) {
    report.worst_violation = std::max(
        report.worst_violation, report.alpha[i] - report.alpha[i - 1]);
  }
  report.is_monotone = report.worst_violation <= tol;
  return report;
}

double supermodularity_probe(const ProblemSpec& spec, double t, double x,
                             double alpha, double h) {
  if (spec.dim != 1) {
    throw DomainError("supermodularity probe supports dim == 1 only");
  }
  if (!(h > 0.0)) {
    throw DomainError("supermodularity probe needs h > 0");
  }
  Vector xv(1);
  Vector av(1);
  auto vv = [&](double xi, double ai) {
    xv[0] = xi;
    av[0] = ai;
    return objective(spec, xv, t, av);
  };
  return (vv(x + h, alpha + h) - vv(x + h, alpha - h) -
          vv(x - h, alpha + h) + vv(x - h, alpha - h)) /
         (4.0 * h * h);
}

}  // namespace hopflax::analysis
