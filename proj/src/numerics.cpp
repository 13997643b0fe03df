#include "hopflax/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hopflax::numerics {

namespace {

// Gauss-Legendre abscissae/weights on [-1, 1], positive half only.
const double kNodes4[] = {0.33998104358485626480, 0.86113631159405257522};
const double kWeights4[] = {0.65214515486254614263, 0.34785484513745385737};

const double kNodes8[] = {0.18343464249564980494, 0.52553240991632898582,
                          0.79666647741362673959, 0.96028985649753623168};
const double kWeights8[] = {0.36268378337836198297, 0.31370664587788728734,
                            0.22238103445337447054, 0.10122853629037625915};

const double kNodes16[] = {0.09501250983763744019, 0.28160355077925891323,
                           0.45801677765722738634, 0.61787624440264374845,
                           0.75540440835500303390, 0.86563120238783174388,
                           0.94457502307323257608, 0.98940093499164993260};
const double kWeights16[] = {0.18945061045506849629, 0.18260341504492358887,
                             0.16915651939500253819, 0.14959598881657673208,
                             0.12462897125553387205, 0.09515851168249278481,
                             0.06225352393864789286, 0.02715245941175409485};

void rule_for_order(int order, const double** nodes, const double** weights,
                    int* half) {
  switch (order) {
    case 4:
      *nodes = kNodes4;
      *weights = kWeights4;
      *half = 2;
      return;
    case 8:
      *nodes = kNodes8;
      *weights = kWeights8;
      *half = 4;
      return;
    case 16:
      *nodes = kNodes16;
      *weights = kWeights16;
      *half = 8;
      return;
    default:
      throw DomainError("quadrature order must be 4, 8 or 16");
  }
}

double eval_checked(const std::function<double(double)>& fn, double s) {
  const double v = fn(s);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "integrand is non-finite at s = " << s;
    throw NonFiniteError(os.str());
  }
  return v;
}

struct Candidate {
  Vector argmin;
  double value = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Lattice offsets around the warm start: the smallest odd per-axis count k
// with k^n >= m, points ordered by distance from the center and then
// lexicographically, truncated to m. Fully deterministic.
std::vector<Vector> multistart_points(const Vector& center, int n, int m,
                                      double radius) {
  if (m <= 1) return {center};
  int k = 1;
  while (std::pow(static_cast<double>(k), n) < static_cast<double>(m)) k += 2;

  std::vector<double> axis(k);
  for (int i = 0; i < k; ++i)
    axis[i] = (k == 1) ? 0.0 : -radius + 2.0 * radius * i / (k - 1);

  std::vector<Vector> offsets;
  Vector cur = Vector::Zero(n);
  std::function<void(int)> enumerate = [&](int d) {
    if (d == n) {
      offsets.push_back(cur);
      return;
    }
    for (int i = 0; i < k; ++i) {
      cur[d] = axis[i];
      enumerate(d + 1);
    }
  };
  enumerate(0);

  auto lex_less = [](const Vector& a, const Vector& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  };
  std::sort(offsets.begin(), offsets.end(),
            [&](const Vector& a, const Vector& b) {
              const double na = a.squaredNorm(), nb = b.squaredNorm();
              if (na != nb) return na < nb;
              return lex_less(a, b);
            });

  std::vector<Vector> pts;
  pts.reserve(m);
  for (int i = 0; i < m && i < static_cast<int>(offsets.size()); ++i)
    pts.push_back(center + offsets[i]);
  return pts;
}

bool lex_less_vec(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Backtracking Armijo search. Returns the accepted step length, or 0 if no
// acceptable step was found.
double line_search(const ScalarFn& fn, const Vector& x, double fx,
                   const Vector& g, const Vector& dir, Vector* x_out,
                   double* f_out) {
  const double c1 = 1e-4;
  const double slope = g.dot(dir);
  double step = 1.0;
  for (int bt = 0; bt < 60; ++bt) {
    Vector trial = x + step * dir;
    double ft = fn(trial);
    if (std::isfinite(ft) && ft <= fx + c1 * step * slope) {
      *x_out = std::move(trial);
      *f_out = ft;
      return step;
    }
    step *= 0.5;
  }
  return 0.0;
}

Candidate run_single_start(const ScalarFn& fn, const GradientFn& grad,
                           const HessianFn& hess, const Vector& start,
                           const MinimizeConfig& cfg, int* iterations) {
  Candidate cand;
  Vector x = start;
  double fx = fn(x);
  if (!std::isfinite(fx)) return cand;
  Vector g = grad(x);
  if (!g.allFinite()) return cand;

  const int n = static_cast<int>(x.size());
  Matrix h_inv = Matrix::Identity(n, n);  // BFGS inverse-Hessian estimate
  bool first_update = true;

  for (int it = 0; it < cfg.max_iter; ++it) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= cfg.grad_tol) {
      cand.argmin = x;
      cand.value = fx;
      cand.grad_norm = gnorm;
      cand.converged = true;
      return cand;
    }
    ++*iterations;

    Vector dir;
    if (hess) {
      Matrix h = hess(x);
      Eigen::LDLT<Matrix> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive())
        dir = ldlt.solve(-g);
      if (dir.size() == 0 || !dir.allFinite() || g.dot(dir) >= 0.0) dir = -g;
    } else {
      dir = -(h_inv * g);
      if (!dir.allFinite() || g.dot(dir) >= 0.0) {
        h_inv = Matrix::Identity(n, n);
        dir = -g;
      }
    }

    Vector x_new;
    double f_new;
    double step = line_search(fn, x, fx, g, dir, &x_new, &f_new);
    if (step == 0.0 && !hess) {
      // Retry once along steepest descent with a reset metric.
      h_inv = Matrix::Identity(n, n);
      dir = -g;
      step = line_search(fn, x, fx, g, dir, &x_new, &f_new);
    }
    if (step == 0.0) break;  // stalled; report the unconverged candidate

    Vector g_new = grad(x_new);
    if (!g_new.allFinite()) break;

    if (!hess) {
      const Vector s = x_new - x;
      const Vector y = g_new - g;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (first_update) {
          h_inv *= sy / y.squaredNorm();
          first_update = false;
        }
        const double rho = 1.0 / sy;
        const Vector hy = h_inv * y;
        h_inv += (sy + y.dot(hy)) * rho * rho * (s * s.transpose());
        h_inv -= rho * (hy * s.transpose() + s * hy.transpose());
      }
    }

    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
  }

  const double gnorm = g.lpNorm<Eigen::Infinity>();
  cand.argmin = x;
  cand.value = fx;
  cand.grad_norm = gnorm;
  cand.converged = gnorm <= cfg.grad_tol;
  return cand;
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double t0, double t1,
                 const QuadratureConfig& cfg) {
  if (!(t1 >= t0)) throw DomainError("integrate: t1 must be >= t0");
  if (cfg.panels < 1) throw DomainError("integrate: panels must be >= 1");
  if (t1 == t0) return 0.0;

  const double* nodes;
  const double* weights;
  int half;
  rule_for_order(cfg.order, &nodes, &weights, &half);

  const double panel_width = (t1 - t0) / cfg.panels;
  double total = 0.0;
  for (int p = 0; p < cfg.panels; ++p) {
    const double a = t0 + p * panel_width;
    const double mid = a + 0.5 * panel_width;
    const double scale = 0.5 * panel_width;
    double acc = 0.0;
    for (int i = 0; i < half; ++i) {
      const double dx = scale * nodes[i];
      acc += weights[i] * (eval_checked(fn, mid - dx) + eval_checked(fn, mid + dx));
    }
    total += scale * acc;
  }
  return total;
}

MinimizeResult minimize(const ScalarFn& fn, const GradientFn& grad, int n,
                        const MinimizeConfig& cfg,
                        const std::optional<Vector>& warm_start,
                        const HessianFn& hess) {
  if (n < 1) throw DomainError("minimize: dimension must be >= 1");
  if (!fn || !grad) throw DomainError("minimize: fn and grad are required");

  Vector center = warm_start ? *warm_start : Vector::Zero(n);
  if (center.size() != n) throw DomainError("minimize: warm start has wrong dimension");

  const auto starts = multistart_points(center, n, std::max(1, cfg.multistart),
                                        cfg.radius);

  std::vector<Candidate> candidates;
  candidates.reserve(starts.size());
  int iterations = 0;
  for (const Vector& s : starts)
    candidates.push_back(run_single_start(fn, grad, hess, s, cfg, &iterations));

  double best_any = std::numeric_limits<double>::infinity();
  double best_any_grad = std::numeric_limits<double>::infinity();
  const Candidate* best_converged = nullptr;
  for (const Candidate& c : candidates) {
    if (c.argmin.size() == 0) continue;
    if (c.value < best_any) {
      best_any = c.value;
      best_any_grad = c.grad_norm;
    }
    if (c.converged &&
        (best_converged == nullptr || c.value < best_converged->value ||
         (c.value == best_converged->value &&
          lex_less_vec(c.argmin, best_converged->argmin))))
      best_converged = &c;
  }

  if (best_converged == nullptr) {
    std::ostringstream os;
    os << "minimize: no start reached grad_tol " << cfg.grad_tol << " within "
       << cfg.max_iter << " iterations";
    throw NonConvergence(os.str(), best_any, best_any_grad, iterations);
  }

  MinimizeResult result;
  result.iterations = iterations;
  result.starts_used = static_cast<int>(starts.size());

  // Tie resolution: among converged candidates within tie_tol of the best
  // value, keep the lexicographically smallest argmin.
  const double cutoff = best_converged->value + cfg.tie_tol;
  const Candidate* winner = nullptr;
  int n_tied = 0;
  double tie_spread = 0.0;
  std::vector<const Candidate*> tied;
  for (const Candidate& c : candidates) {
    if (!c.converged) continue;
    ++result.converged_starts;
    if (c.value <= cutoff) {
      tied.push_back(&c);
      if (winner == nullptr || lex_less_vec(c.argmin, winner->argmin))
        winner = &c;
    }
  }
  n_tied = static_cast<int>(tied.size());
  for (size_t i = 0; i < tied.size(); ++i)
    for (size_t j = i + 1; j < tied.size(); ++j)
      tie_spread = std::max(
          tie_spread,
          (tied[i]->argmin - tied[j]->argmin).lpNorm<Eigen::Infinity>());

  result.argmin = winner->argmin;
  result.value = winner->value;
  result.grad_norm = winner->grad_norm;
  result.n_tied = n_tied;
  result.tie_spread = tie_spread;
  return result;
}

Vector finite_diff_grad(const ScalarFn& fn, const Vector& x,
                        const FiniteDiffConfig& cfg) {
  if (!(cfg.step > 0.0)) throw DomainError("finite_diff_grad: step must be > 0");
  Vector g(x.size());
  Vector probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + cfg.step;
    const double fp = fn(probe);
    probe[i] = x[i] - cfg.step;
    const double fm = fn(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NonFiniteError("finite_diff_grad: fn is non-finite near x");
    g[i] = (fp - fm) / (2.0 * cfg.step);
  }
  return g;
}

}  // namespace hopflax::numerics
