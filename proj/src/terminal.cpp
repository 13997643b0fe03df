#include "hopflax/terminal.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace hopflax {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TerminalModel TerminalModel::linear(const VectorXd& a, double b) {
  if (a.size() < 1) throw DomainError("linear terminal: a must be non-empty");
  TerminalModel m;
  m.kind = TerminalKind::Linear;
  m.dim = static_cast<int>(a.size());
  const VectorXd ac = a;
  m.value = [ac, b](const VectorXd& x) { return ac.dot(x) + b; };
  m.gradient = [ac](const VectorXd&) -> VectorXd { return ac; };
  m.hessian = [n = m.dim](const VectorXd&) -> MatrixXd {
    return MatrixXd::Zero(n, n);
  };
  m.lip_const = a.norm();
  m.convex = true;
  return m;
}

TerminalModel TerminalModel::pseudo_huber(double scale, int dim) {
  if (!(scale > 0.0)) throw DomainError("pseudo-huber terminal: scale must be > 0");
  if (dim < 1) throw DomainError("pseudo-huber terminal: dim must be >= 1");
  TerminalModel m;
  m.kind = TerminalKind::PseudoHuber;
  m.dim = dim;
  const double d2 = scale * scale;
  m.value = [d2](const VectorXd& x) {
    return d2 * (std::sqrt(1.0 + x.squaredNorm() / d2) - 1.0);
  };
  m.gradient = [d2](const VectorXd& x) -> VectorXd {
    return x / std::sqrt(1.0 + x.squaredNorm() / d2);
  };
  m.hessian = [scale, d2](const VectorXd& x) -> MatrixXd {
    const double q = d2 + x.squaredNorm();
    const int n = static_cast<int>(x.size());
    return scale * (q * MatrixXd::Identity(n, n) - x * x.transpose()) /
           (q * std::sqrt(q));
  };
  m.lip_const = scale;
  m.convex = true;
  return m;
}

TerminalModel TerminalModel::custom(
    int dim, std::function<double(const VectorXd&)> value,
    std::function<VectorXd(const VectorXd&)> gradient,
    std::function<MatrixXd(const VectorXd&)> hessian,
    std::optional<double> lip_const, bool convex) {
  if (dim < 1) throw DomainError("custom terminal: dim must be >= 1");
  if (!value) throw DomainError("custom terminal: value callback is required");
  TerminalModel m;
  m.kind = TerminalKind::Custom;
  m.dim = dim;
  m.value = std::move(value);
  m.gradient = std::move(gradient);
  m.hessian = std::move(hessian);
  m.lip_const = lip_const;
  m.convex = convex;
  return m;
}

ValidationReport validate_terminal(const TerminalModel& model, int samples,
                                   unsigned seed) {
  ValidationReport rep;
  std::ostringstream os;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);

  for (int i = 0; i < samples; ++i) {
    VectorXd x(model.dim), y(model.dim);
    for (int j = 0; j < model.dim; ++j) {
      x[j] = unif(rng);
      y[j] = unif(rng);
    }

    if (model.lip_const) {
      const double gap = std::abs(model.value(x) - model.value(y));
      const double bound = *model.lip_const * (x - y).norm();
      if (gap > bound + 1e-9) {
        rep.ok = false;
        os << "Lipschitz bound violated between sampled points; ";
      }
    }

    if (model.gradient) {
      const VectorXd g = model.gradient(x);
      for (int j = 0; j < model.dim; ++j) {
        VectorXd xp = x, xm = x;
        xp[j] += 1e-5;
        xm[j] -= 1e-5;
        const double fd = (model.value(xp) - model.value(xm)) / 2e-5;
        if (std::abs(fd - g[j]) > 1e-5 * (1.0 + std::abs(g[j]))) {
          rep.ok = false;
          os << "gradient/value mismatch at sample " << i << "; ";
        }
      }
    }

    if (model.convex && model.hessian) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(model.hessian(x));
      if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-9) {
        rep.ok = false;
        os << "hessian of a convex terminal is not positive semidefinite; ";
      }
    }
  }

  rep.detail = os.str();
  return rep;
}

}  // namespace hopflax
