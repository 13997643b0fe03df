#include "hopflax/convex.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hopflax {

namespace {

double power_norm_term(const Vector& u, double p) {
  return std::pow(u.norm(), p) / p;
}

Vector power_gradient(const Vector& u, double p) {
  const double r = u.norm();
  if (r == 0.0) return Vector::Zero(u.size());
  return std::pow(r, p - 2.0) * u;
}

Matrix power_hessian(const Vector& u, double p) {
  const int n = static_cast<int>(u.size());
  const double r = u.norm();
  if (r == 0.0) return Matrix::Zero(n, n);
  Matrix h = std::pow(r, p - 2.0) * Matrix::Identity(n, n);
  h += (p - 2.0) * std::pow(r, p - 4.0) * (u * u.transpose());
  return h;
}

Vector newton_iota(const LagrangianModel& model, const Vector& q) {
  // Damped Newton on grad l(u) = q with residual-decrease backtracking.
  Vector u;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.hessian(Vector::Zero(model.dim)));
    const double lmin = es.info() == Eigen::Success
                            ? std::max(es.eigenvalues().minCoeff(), 1e-8)
                            : 1.0;
    u = q / lmin;
  }
  const double tol = model.iota_tol * (1.0 + q.lpNorm<Eigen::Infinity>());
  Vector r = model.gradient(u) - q;
  double rnorm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < model.iota_max_iter; ++it) {
    if (rnorm <= tol) return u;
    Vector step = model.hessian(u).ldlt().solve(-r);
    if (!step.allFinite()) step = -r;
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector trial = u + lambda * step;
      Vector rt = model.gradient(trial) - q;
      const double rtn = rt.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rtn) && rtn < rnorm) {
        u = std::move(trial);
        r = std::move(rt);
        rnorm = rtn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (rnorm <= tol) return u;
  std::ostringstream os;
  os << "iota: Newton stalled with residual " << rnorm << " (tol " << tol << ")";
  throw NonConvergence(os.str(), rnorm, rnorm, model.iota_max_iter);
}

}  // namespace

LagrangianModel LagrangianModel::quadratic(const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() < 1)
    throw DomainError("quadratic Lagrangian: Q must be square and non-empty");
  if (!q.isApprox(q.transpose(), 1e-12))
    throw DomainError("quadratic Lagrangian: Q must be symmetric");
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success)
    throw DomainError("quadratic Lagrangian: Q must be positive definite");

  LagrangianModel m;
  m.kind = LagrangianKind::Quadratic;
  m.dim = static_cast<int>(q.rows());
  m.quad_q = q;
  m.quad_q_inv = llt.solve(Matrix::Identity(q.rows(), q.cols()));
  const Matrix qc = q;
  m.value = [qc](const Vector& u) { return 0.5 * u.dot(qc * u); };
  m.gradient = [qc](const Vector& u) -> Vector { return qc * u; };
  m.hessian = [qc](const Vector&) -> Matrix { return qc; };
  return m;
}

LagrangianModel LagrangianModel::isotropic_power(double p, int dim) {
  if (!(p > 1.0)) throw DomainError("isotropic-power Lagrangian: p must be > 1");
  if (dim < 1) throw DomainError("isotropic-power Lagrangian: dim must be >= 1");

  LagrangianModel m;
  m.kind = LagrangianKind::IsotropicPower;
  m.dim = dim;
  m.power_p = p;
  m.value = [p](const Vector& u) { return power_norm_term(u, p); };
  m.gradient = [p](const Vector& u) { return power_gradient(u, p); };
  m.hessian = [p](const Vector& u) { return power_hessian(u, p); };
  return m;
}

LagrangianModel LagrangianModel::custom(
    int dim, std::function<double(const Vector&)> value,
    std::function<Vector(const Vector&)> gradient,
    std::function<Matrix(const Vector&)> hessian) {
  if (dim < 1) throw DomainError("custom Lagrangian: dim must be >= 1");
  if (!value || !gradient || !hessian)
    throw DomainError("custom Lagrangian: value, gradient and hessian are required");
  LagrangianModel m;
  m.kind = LagrangianKind::Custom;
  m.dim = dim;
  m.value = std::move(value);
  m.gradient = std::move(gradient);
  m.hessian = std::move(hessian);
  return m;
}

Vector iota(const LagrangianModel& model, const Vector& q) {
  if (q.size() != model.dim) throw DomainError("iota: q has wrong dimension");
  switch (model.kind) {
    case LagrangianKind::Quadratic:
      return model.quad_q_inv * q;
    case LagrangianKind::IsotropicPower: {
      const double r = q.norm();
      if (r == 0.0) return Vector::Zero(model.dim);
      // |u|^(p-2) u = q  =>  u = q |q|^((2-p)/(p-1))
      return q * std::pow(r, (2.0 - model.power_p) / (model.power_p - 1.0));
    }
    case LagrangianKind::Custom:
      return newton_iota(model, q);
  }
  throw DomainError("iota: unknown Lagrangian kind");
}

double conjugate(const LagrangianModel& model, const Vector& p) {
  if (p.size() != model.dim) throw DomainError("conjugate: p has wrong dimension");
  switch (model.kind) {
    case LagrangianKind::Quadratic:
      return 0.5 * p.dot(model.quad_q_inv * p);
    case LagrangianKind::IsotropicPower: {
      const double dual = model.power_p / (model.power_p - 1.0);
      return std::pow(p.norm(), dual) / dual;
    }
    case LagrangianKind::Custom: {
      const Vector u = iota(model, p);
      return p.dot(u) - model.value(u);
    }
  }
  throw DomainError("conjugate: unknown Lagrangian kind");
}

ValidationReport validate_lagrangian(const LagrangianModel& model, int samples,
                                     unsigned seed) {
  ValidationReport rep;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::ostringstream os;

  const double fd_step = 1e-5;
  for (int s = 0; s < samples; ++s) {
    Vector u(model.dim);
    do {
      for (int i = 0; i < model.dim; ++i) u[i] = unif(rng);
    } while (u.norm() < 1e-3);

    // Gradient vs central differences of value.
    const Vector g = model.gradient(u);
    for (int i = 0; i < model.dim; ++i) {
      Vector up = u, um = u;
      up[i] += fd_step;
      um[i] -= fd_step;
      const double fd = (model.value(up) - model.value(um)) / (2.0 * fd_step);
      if (std::abs(fd - g[i]) > 1e-5 * (1.0 + std::abs(g[i]))) {
        rep.ok = false;
        os << "gradient/value mismatch at sample " << s << " component " << i
           << " (fd " << fd << " vs " << g[i] << "); ";
      }
    }

    // Hessian must be symmetric positive definite away from the origin.
    const Matrix h = model.hessian(u);
    if (!h.isApprox(h.transpose(), 1e-9)) {
      rep.ok = false;
      os << "hessian not symmetric at sample " << s << "; ";
    }
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
      rep.ok = false;
      os << "hessian not positive definite at sample " << s << "; ";
    }
  }

  // Superlinearity: l(r e)/r must increase along every sampled ray.
  for (int s = 0; s < 8; ++s) {
    Vector e(model.dim);
    for (int i = 0; i < model.dim; ++i) e[i] = gauss(rng);
    if (e.norm() < 1e-12) continue;
    e.normalize();
    double prev = -std::numeric_limits<double>::infinity();
    for (double r : {10.0, 100.0, 1000.0}) {
      const double slope = model.value(r * e) / r;
      if (!(slope > prev)) {
        rep.ok = false;
        os << "growth not superlinear along sampled direction " << s << "; ";
      }
      prev = slope;
    }
  }

  rep.detail = os.str();
  return rep;
}

}  // namespace hopflax
