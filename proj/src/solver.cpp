#include "hopflax/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hopflax {

namespace {

void check_point(const ProblemSpec& spec, const Vector& x, double t) {
  if (x.size() != spec.dim) throw DomainError("state x has wrong dimension");
  if (t < 0.0 || t > spec.horizon) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << spec.horizon << "]";
    throw DomainError(os.str());
  }
}

// Shared quadrature grid over [t, T] with the discount factors evaluated once
// per solve; every objective and gradient call reuses it.
struct SolveGrid {
  std::vector<double> s;
  std::vector<double> w;
  std::vector<double> d;
  std::vector<double> d_inv;
  double d_T = 1.0;
  double inv_sum = 0.0;  // sum w_j / d_j, the quadrature value of int 1/d
};

const double* gauss_nodes(int order, int* half);
const double* gauss_weights(int order);

const double kN4[] = {0.33998104358485626480, 0.86113631159405257522};
const double kW4[] = {0.65214515486254614263, 0.34785484513745385737};
const double kN8[] = {0.18343464249564980494, 0.52553240991632898582,
                      0.79666647741362673959, 0.96028985649753623168};
const double kW8[] = {0.36268378337836198297, 0.31370664587788728734,
                      0.22238103445337447054, 0.10122853629037625915};
const double kN16[] = {0.09501250983763744019, 0.28160355077925891323,
                       0.45801677765722738634, 0.61787624440264374845,
                       0.75540440835500303390, 0.86563120238783174388,
                       0.94457502307323257608, 0.98940093499164993260};
const double kW16[] = {0.18945061045506849629, 0.18260341504492358887,
                       0.16915651939500253819, 0.14959598881657673208,
                       0.12462897125553387205, 0.09515851168249278481,
                       0.06225352393864789286, 0.02715245941175409485};

const double* gauss_nodes(int order, int* half) {
  switch (order) {
    case 4:
      *half = 2;
      return kN4;
    case 8:
      *half = 4;
      return kN8;
    case 16:
      *half = 8;
      return kN16;
  }
  throw DomainError("quadrature order must be 4, 8 or 16");
}

const double* gauss_weights(int order) {
  switch (order) {
    case 4:
      return kW4;
    case 8:
      return kW8;
    case 16:
      return kW16;
  }
  throw DomainError("quadrature order must be 4, 8 or 16");
}

SolveGrid make_grid(const ProblemSpec& spec, double t0, double t1) {
  int half;
  const double* nodes = gauss_nodes(spec.quad.order, &half);
  const double* weights = gauss_weights(spec.quad.order);

  SolveGrid g;
  const int count = spec.quad.panels * 2 * half;
  g.s.reserve(count);
  g.w.reserve(count);
  const double width = (t1 - t0) / spec.quad.panels;
  for (int p = 0; p < spec.quad.panels; ++p) {
    const double mid = t0 + (p + 0.5) * width;
    const double scale = 0.5 * width;
    for (int i = half - 1; i >= 0; --i) {
      g.s.push_back(mid - scale * nodes[i]);
      g.w.push_back(scale * weights[i]);
    }
    for (int i = 0; i < half; ++i) {
      g.s.push_back(mid + scale * nodes[i]);
      g.w.push_back(scale * weights[i]);
    }
  }
  g.d.resize(g.s.size());
  g.d_inv.resize(g.s.size());
  for (size_t j = 0; j < g.s.size(); ++j) {
    g.d[j] = spec.discount.eval(t0, g.s[j]);
    g.d_inv[j] = 1.0 / g.d[j];
    g.inv_sum += g.w[j] * g.d_inv[j];
  }
  g.d_T = spec.discount.eval(t0, t1);
  return g;
}

double grid_objective(const ProblemSpec& spec, const SolveGrid& g,
                      const Vector& x, const Vector& alpha, Vector* y_end_out) {
  const LagrangianModel& l = spec.lagrangian;
  double running = 0.0;
  Vector y_end = x;

  if (l.kind == LagrangianKind::Quadratic) {
    // l is 2-homogeneous, so the candidate velocity is alpha / d and both
    // integrals collapse onto the tabulated value of int 1/d.
    running = l.value(alpha) * g.inv_sum;
    y_end += g.inv_sum * alpha;
  } else {
    const Vector p = l.gradient(alpha);
    for (size_t j = 0; j < g.s.size(); ++j) {
      const Vector u = iota(l, g.d_inv[j] * p);
      running += g.w[j] * g.d[j] * l.value(u);
      y_end += g.w[j] * u;
    }
  }

  if (y_end_out) *y_end_out = y_end;
  return running + g.d_T * spec.terminal.value(y_end);
}

Vector grid_gradient(const ProblemSpec& spec, const SolveGrid& g, const Vector& x,
                     const Vector& alpha) {
  const LagrangianModel& l = spec.lagrangian;
  Vector y_end;
  grid_objective(spec, g, x, alpha, &y_end);
  const Vector q = l.gradient(alpha) + g.d_T * spec.terminal.gradient(y_end);

  if (l.kind == LagrangianKind::Quadratic) return g.inv_sum * q;

  const Vector p = l.gradient(alpha);
  Vector acc = Vector::Zero(spec.dim);
  for (size_t j = 0; j < g.s.size(); ++j) {
    const Vector u = iota(l, g.d_inv[j] * p);
    acc += g.w[j] * g.d_inv[j] * l.hessian(u).ldlt().solve(q);
  }
  return l.hessian(alpha) * acc;
}

// Vector-valued candidate-velocity integral over [a, b], on the same kind of
// composite Gauss grid as the solver uses.
Vector integrate_velocity(const ProblemSpec& spec, double t, const Vector& alpha,
                          double a, double b, int panels) {
  int half;
  const double* nodes = gauss_nodes(spec.quad.order, &half);
  const double* weights = gauss_weights(spec.quad.order);
  const Vector p = spec.lagrangian.gradient(alpha);

  Vector acc = Vector::Zero(spec.dim);
  const double width = (b - a) / panels;
  for (int pa = 0; pa < panels; ++pa) {
    const double mid = a + (pa + 0.5) * width;
    const double scale = 0.5 * width;
    for (int i = 0; i < half; ++i) {
      for (double s : {mid - scale * nodes[i], mid + scale * nodes[i]}) {
        const double dinv = 1.0 / spec.discount.eval(t, s);
        acc += (scale * weights[i]) * iota(spec.lagrangian, dinv * p);
      }
    }
  }
  return acc;
}

SolveResult terminal_result(const ProblemSpec& spec, const Vector& x, double t) {
  SolveResult r;
  r.v = spec.terminal.value(x);
  const double d_T = spec.discount.eval(t, spec.horizon);
  if (spec.terminal.gradient) {
    r.alpha = iota(spec.lagrangian, -d_T * spec.terminal.gradient(x));
    r.p = spec.lagrangian.gradient(r.alpha);
    r.foc_residual =
        (r.p + d_T * spec.terminal.gradient(x)).lpNorm<Eigen::Infinity>();
  } else {
    r.alpha = Vector::Zero(spec.dim);
    r.p = spec.lagrangian.gradient(r.alpha);
    r.foc_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace

void validate_spec(const ProblemSpec& spec) {
  if (spec.dim < 1) throw DomainError("spec: dim must be >= 1");
  if (!(spec.horizon > 0.0)) throw DomainError("spec: horizon must be > 0");
  if (spec.lagrangian.dim != spec.dim)
    throw DomainError("spec: Lagrangian dimension mismatch");
  if (spec.terminal.dim != spec.dim)
    throw DomainError("spec: terminal dimension mismatch");
  if (std::abs(spec.discount.horizon - spec.horizon) > 1e-12)
    throw DomainError("spec: discount horizon mismatch");
  if (!(spec.terminal_eps > 0.0))
    throw DomainError("spec: terminal_eps must be > 0");
}

Vector control_profile(const ProblemSpec& spec, double t, const Vector& alpha,
                       double s) {
  if (alpha.size() != spec.dim) throw DomainError("alpha has wrong dimension");
  const double dinv = 1.0 / spec.discount.eval(t, s);  // validates t <= s <= T
  return iota(spec.lagrangian, dinv * spec.lagrangian.gradient(alpha));
}

Vector arc_position(const ProblemSpec& spec, double t, const Vector& x,
                    const Vector& alpha, double s) {
  check_point(spec, x, t);
  if (alpha.size() != spec.dim) throw DomainError("alpha has wrong dimension");
  if (s < t || s > spec.horizon)
    throw DomainError("arc_position: s outside [t, horizon]");
  if (s == t) return x;
  return x + integrate_velocity(spec, t, alpha, t, s, spec.quad.panels);
}

double objective(const ProblemSpec& spec, const Vector& x, double t,
                 const Vector& alpha) {
  check_point(spec, x, t);
  if (alpha.size() != spec.dim) throw DomainError("alpha has wrong dimension");
  if (t >= spec.horizon) throw DomainError("objective: t must be < horizon");
  const SolveGrid g = make_grid(spec, t, spec.horizon);
  return grid_objective(spec, g, x, alpha, nullptr);
}

Vector objective_gradient(const ProblemSpec& spec, const Vector& x, double t,
                          const Vector& alpha) {
  check_point(spec, x, t);
  if (alpha.size() != spec.dim) throw DomainError("alpha has wrong dimension");
  if (t >= spec.horizon) throw DomainError("objective_gradient: t must be < horizon");
  if (!spec.terminal.gradient)
    throw DomainError("objective_gradient: terminal gradient is required");
  const SolveGrid g = make_grid(spec, t, spec.horizon);
  return grid_gradient(spec, g, x, alpha);
}

SolveResult hopf_lax_value(const ProblemSpec& spec, const Vector& x, double t,
                           const std::optional<Vector>& warm_start) {
  check_point(spec, x, t);
  if (spec.horizon - t <= spec.terminal_eps) return terminal_result(spec, x, t);

  const SolveGrid g = make_grid(spec, t, spec.horizon);

  numerics::ScalarFn fn = [&](const Vector& a) {
    return grid_objective(spec, g, x, a, nullptr);
  };
  numerics::GradientFn grad;
  if (spec.terminal.gradient) {
    grad = [&](const Vector& a) { return grid_gradient(spec, g, x, a); };
  } else {
    grad = [&, fn](const Vector& a) {
      return numerics::finite_diff_grad(fn, a, spec.finite_diff);
    };
  }

  const numerics::MinimizeResult m =
      numerics::minimize(fn, grad, spec.dim, spec.minimize, warm_start);

  SolveResult r;
  r.v = m.value;
  r.alpha = m.argmin;
  r.p = spec.lagrangian.gradient(m.argmin);
  r.starts_used = m.starts_used;
  r.iterations = m.iterations;
  r.n_tied = m.n_tied;
  r.tie_spread = m.tie_spread;
  if (spec.terminal.gradient) {
    Vector y_end;
    grid_objective(spec, g, x, m.argmin, &y_end);
    r.foc_residual = (r.p + g.d_T * spec.terminal.gradient(y_end))
                         .lpNorm<Eigen::Infinity>();
  } else {
    r.foc_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

Arc optimal_arc(const ProblemSpec& spec, const Vector& x, double t, int samples) {
  check_point(spec, x, t);
  if (samples < 2) throw DomainError("optimal_arc: samples must be >= 2");

  const SolveResult sol = hopf_lax_value(spec, x, t);
  const double T = spec.horizon;

  Arc arc;
  arc.times.resize(samples);
  arc.positions.resize(samples);
  arc.velocities.resize(samples);

  const int sub_panels =
      std::max(1, (spec.quad.panels + samples - 2) / (samples - 1));
  Vector pos = x;
  for (int i = 0; i < samples; ++i) {
    const double s = (i == samples - 1) ? T : t + (T - t) * i / (samples - 1);
    arc.times[i] = s;
    if (i > 0 && s > arc.times[i - 1])
      pos += integrate_velocity(spec, t, sol.alpha, arc.times[i - 1], s, sub_panels);
    arc.positions[i] = pos;
    arc.velocities[i] = (T - t <= spec.terminal_eps)
                            ? sol.alpha
                            : control_profile(spec, t, sol.alpha, s);
  }
  arc.cost = (T - t <= spec.terminal_eps) ? spec.terminal.value(x)
                                          : objective(spec, x, t, sol.alpha);
  return arc;
}

double hamiltonian(const ProblemSpec& spec, double t, double s, const Vector& u,
                   const Vector& p) {
  if (u.size() != spec.dim || p.size() != spec.dim)
    throw DomainError("hamiltonian: u and p must match the problem dimension");
  return p.dot(u) - spec.discount.eval(t, s) * spec.lagrangian.value(u);
}

double classical_hopf_lax(const ProblemSpec& spec, const Vector& x, double t) {
  check_point(spec, x, t);
  if (t >= spec.horizon) throw DomainError("classical form needs t < horizon");
  if (!spec.discount.is_constant_one())
    throw DomainError("classical form requires a constant-one discount");

  const double tau = spec.horizon - t;
  numerics::ScalarFn fn = [&](const Vector& z) {
    return tau * spec.lagrangian.value((z - x) / tau) + spec.terminal.value(z);
  };
  numerics::GradientFn grad;
  if (spec.terminal.gradient) {
    grad = [&](const Vector& z) -> Vector {
      return spec.lagrangian.gradient((z - x) / tau) + spec.terminal.gradient(z);
    };
  } else {
    grad = [&, fn](const Vector& z) {
      return numerics::finite_diff_grad(fn, z, spec.finite_diff);
    };
  }
  numerics::HessianFn hess;
  if (spec.terminal.hessian) {
    hess = [&](const Vector& z) -> Matrix {
      return spec.lagrangian.hessian((z - x) / tau) / tau +
             spec.terminal.hessian(z);
    };
  }

  return numerics::minimize(fn, grad, spec.dim, spec.minimize, x, hess).value;
}

}  // namespace hopflax
