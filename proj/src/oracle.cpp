#include "hopflax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hopflax/errors.hpp"
#include "hopflax/solver.hpp"

namespace hopflax::oracle {
namespace {

double node_time(double t, double h, int i, NodeQuadrature q) {
  return q == NodeQuadrature::Midpoint ? t + h * (i + 0.5) : t + h * i;
}

// Piecewise-linear read of a value table with linear extrapolation past the
// ends, so the inner minimization stays well defined near the grid boundary.
double interp_line(const std::vector<double>& v, double x0, double dx,
                   double xq) {
  const int n = static_cast<int>(v.size());
  const double s = (xq - x0) / dx;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, n - 2);
  const double w = s - i;
  return v[static_cast<std::size_t>(i)] * (1.0 - w) +
         v[static_cast<std::size_t>(i) + 1] * w;
}

double golden_min(const std::function<double(double)>& fn, double lo,
                  double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return std::min(fn(mid), std::min(fc, fd));
}

// One backward induction pass. Each step reads the discount with the clock
// reset to the current time, which is the committed-value recursion when the
// discount is multiplicative and the naive one otherwise.
double backward_induction(const ProblemSpec& spec, const Vector& x, double t,
                          const BellmanConfig& cfg) {
  if (spec.dim != 1) {
    throw DomainError("backward induction supports dim == 1 only");
  }
  if (!(t >= 0.0) || !(t < spec.horizon)) {
    throw DomainError("backward induction requires 0 <= t < horizon");
  }
  if (cfg.x_count < 2 || cfg.steps < 1) {
    throw ConfigError("backward induction needs x_count >= 2 and steps >= 1");
  }
  if (!(cfg.x_max > cfg.x_min)) {
    throw ConfigError("backward induction needs x_max > x_min");
  }
  if (x[0] < cfg.x_min || x[0] > cfg.x_max) {
    throw DomainError("query point lies outside the state grid");
  }

  const int kx = cfg.x_count;
  const double dx = (cfg.x_max - cfg.x_min) / (kx - 1);
  const double h = (spec.horizon - t) / cfg.steps;
  const double u_cap =
      std::max(8.0, 4.0 * (cfg.x_max - cfg.x_min) / (spec.horizon - t));
  const double u_tol = 1e-10 * std::max(1.0, u_cap);

  std::vector<double> value(static_cast<std::size_t>(kx));
  Vector xs(1);
  for (int i = 0; i < kx; ++i) {
    xs[0] = cfg.x_min + i * dx;
    value[static_cast<std::size_t>(i)] = spec.terminal.value(xs);
  }

  std::vector<double> next = value;
  Vector u(1);
  for (int k = cfg.steps - 1; k >= 0; --k) {
    const double tk = t + k * h;
    const double d_run = spec.discount.eval(tk, tk + 0.5 * h);
    const double d_next = spec.discount.eval(tk, tk + h);
    std::swap(next, value);
    for (int i = 0; i < kx; ++i) {
      const double xi = cfg.x_min + i * dx;
      auto step_cost = [&](double ui) {
        u[0] = ui;
        return h * d_run * spec.lagrangian.value(u) +
               d_next * interp_line(next, cfg.x_min, dx, xi + h * ui);
      };
      value[static_cast<std::size_t>(i)] =
          golden_min(step_cost, -u_cap, u_cap, u_tol);
    }
  }
  return interp_line(value, cfg.x_min, dx, x[0]);
}

}  // namespace

double arc_cost(const ProblemSpec& spec, double t,
                const std::vector<Vector>& nodes,
                NodeQuadrature node_quadrature) {
  if (nodes.size() < 2) {
    throw DomainError("arc_cost needs at least two nodes");
  }
  if (!(t < spec.horizon)) {
    throw DomainError("arc_cost requires t < horizon");
  }
  for (const Vector& node : nodes) {
    if (node.size() != spec.dim) {
      throw DomainError("arc_cost: node dimension mismatch");
    }
  }
  const int n_steps = static_cast<int>(nodes.size()) - 1;
  const double h = (spec.horizon - t) / n_steps;
  double cost = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    const Vector u = (nodes[static_cast<std::size_t>(i) + 1] -
                      nodes[static_cast<std::size_t>(i)]) /
                     h;
    const double s = node_time(t, h, i, node_quadrature);
    cost += spec.discount.eval(t, s) * spec.lagrangian.value(u) * h;
  }
  cost += spec.discount.eval(t, spec.horizon) *
          spec.terminal.value(nodes.back());
  return cost;
}

double transcribe_value(const ProblemSpec& spec, const Vector& x, double t,
                        const TranscriptionConfig& cfg) {
  if (spec.horizon - t <= spec.terminal_eps) {
    return spec.terminal.value(x);
  }
  if (cfg.steps < 1) {
    throw ConfigError("transcription needs steps >= 1");
  }
  if (!spec.terminal.gradient) {
    throw ConfigError("transcription needs a terminal gradient");
  }
  const int n = spec.dim;
  const int n_steps = cfg.steps;
  const int n_var = n * n_steps;
  const double h = (spec.horizon - t) / n_steps;

  std::vector<double> disc(static_cast<std::size_t>(n_steps));
  for (int i = 0; i < n_steps; ++i) {
    disc[static_cast<std::size_t>(i)] =
        spec.discount.eval(t, node_time(t, h, i, cfg.node_quadrature));
  }
  const double d_end = spec.discount.eval(t, spec.horizon);

  auto node_at = [&](const Vector& z, int i) -> Vector {
    if (i == 0) {
      return x;
    }
    return z.segment(static_cast<Eigen::Index>(i - 1) * n, n);
  };

  auto fn = [&](const Vector& z) {
    double cost = 0.0;
    Vector prev = x;
    for (int i = 0; i < n_steps; ++i) {
      const Vector cur = node_at(z, i + 1);
      cost += disc[static_cast<std::size_t>(i)] *
              spec.lagrangian.value((cur - prev) / h) * h;
      prev = cur;
    }
    return cost + d_end * spec.terminal.value(prev);
  };

  auto grad = [&](const Vector& z) {
    Vector g = Vector::Zero(n_var);
    for (int j = 1; j <= n_steps; ++j) {
      const Vector u_in = (node_at(z, j) - node_at(z, j - 1)) / h;
      Vector block = disc[static_cast<std::size_t>(j - 1)] *
                     spec.lagrangian.gradient(u_in);
      if (j < n_steps) {
        const Vector u_out = (node_at(z, j + 1) - node_at(z, j)) / h;
        block -= disc[static_cast<std::size_t>(j)] *
                 spec.lagrangian.gradient(u_out);
      } else {
        block += d_end * spec.terminal.gradient(node_at(z, j));
      }
      g.segment(static_cast<Eigen::Index>(j - 1) * n, n) = block;
    }
    return g;
  };

  numerics::HessianFn hess = nullptr;
  if (spec.lagrangian.hessian && spec.terminal.hessian) {
    hess = [&, n, n_steps, h, d_end](const Vector& z) {
      Matrix hm = Matrix::Zero(n_var, n_var);
      for (int i = 0; i < n_steps; ++i) {
        const Vector u = (node_at(z, i + 1) - node_at(z, i)) / h;
        const Matrix block =
            (disc[static_cast<std::size_t>(i)] / h) * spec.lagrangian.hessian(u);
        const Eigen::Index b = static_cast<Eigen::Index>(i) * n;
        hm.block(b, b, n, n) += block;
        if (i >= 1) {
          const Eigen::Index a = b - n;
          hm.block(a, a, n, n) += block;
          hm.block(a, b, n, n) -= block;
          hm.block(b, a, n, n) -= block;
        }
      }
      const Eigen::Index last = static_cast<Eigen::Index>(n_steps - 1) * n;
      hm.block(last, last, n, n) +=
          d_end * spec.terminal.hessian(node_at(z, n_steps));
      return hm;
    };
  }

  numerics::MinimizeConfig mcfg = cfg.minimize;
  mcfg.multistart = 1;

  std::vector<Vector> warm_starts;
  {
    Vector flat(n_var);
    try {
      const Arc arc = optimal_arc(spec, x, t, n_steps + 1);
      for (int i = 1; i <= n_steps; ++i) {
        flat.segment(static_cast<Eigen::Index>(i - 1) * n, n) =
            arc.positions[static_cast<std::size_t>(i)];
      }
      warm_starts.push_back(flat);
    } catch (const NonConvergence&) {
      // fall through to the constant arc
    }
    for (int i = 1; i <= n_steps; ++i) {
      flat.segment(static_cast<Eigen::Index>(i - 1) * n, n) = x;
    }
    warm_starts.push_back(flat);
  }

  bool have = false;
  double best = 0.0;
  const NonConvergence* last_failure = nullptr;
  NonConvergence failure("transcription failed to converge", 0.0, 0.0, 0);
  for (const Vector& w : warm_starts) {
    try {
      const numerics::MinimizeResult res =
          numerics::minimize(fn, grad, n_var, mcfg, w, hess);
      if (!have || res.value < best) {
        best = res.value;
        have = true;
      }
    } catch (const NonConvergence& e) {
      failure = e;
      last_failure = &failure;
    }
  }
  if (!have) {
    if (last_failure != nullptr) {
      throw *last_failure;
    }
    throw NonConvergence("transcription produced no candidates", 0.0, 0.0, 0);
  }
  return best;
}

double bellman_value(const ProblemSpec& spec, const Vector& x, double t,
                     const BellmanConfig& cfg) {
  if (spec.discount.kind != DiscountKind::ExponentialRate) {
    throw DomainError(
        "backward induction is only valid for multiplicative "
        "(exponential-rate) discounts; use bellman_recursion to inspect the "
        "naive scheme");
  }
  return backward_induction(spec, x, t, cfg);
}

double bellman_recursion(const ProblemSpec& spec, const Vector& x, double t,
                         const BellmanConfig& cfg) {
  return backward_induction(spec, x, t, cfg);
}

}  // namespace hopflax::oracle
