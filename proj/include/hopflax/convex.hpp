#ifndef HOPFLAX_CONVEX_HPP
#define HOPFLAX_CONVEX_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "hopflax/errors.hpp"
#include "hopflax/validation.hpp"

namespace hopflax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class LagrangianKind { Quadratic, IsotropicPower, Custom };

/// A running-cost integrand: C^2, strictly convex and superlinear, so the
/// gradient map is a bijection and the convex conjugate is finite everywhere.
/// Built-in kinds carry closed forms; Custom falls back to damped Newton for
/// the gradient inverse.
struct LagrangianModel {
  LagrangianKind kind = LagrangianKind::Custom;
  int dim = 0;

  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;

  Matrix quad_q;      // Quadratic: l(u) = u'Qu/2
  Matrix quad_q_inv;
  double power_p = 0.0;  // IsotropicPower: l(u) = |u|^p / p

  double iota_tol = 1e-10;
  int iota_max_iter = 100;

  static LagrangianModel quadratic(const Matrix& q);
  static LagrangianModel isotropic_power(double p, int dim);
  static LagrangianModel custom(int dim, std::function<double(const Vector&)> value,
                                std::function<Vector(const Vector&)> gradient,
                                std::function<Matrix(const Vector&)> hessian);
};

/// Inverse of the gradient map: iota(q) is the unique u with grad l(u) = q.
Vector iota(const LagrangianModel& model, const Vector& q);

/// Convex conjugate l*(p) = sup_u { p.u - l(u) } = p.iota(p) - l(iota(p)).
double conjugate(const LagrangianModel& model, const Vector& p);

/// Samples gradient consistency, Hessian positive-definiteness and
/// superlinear growth along random directions.
ValidationReport validate_lagrangian(const LagrangianModel& model,
                                     int samples = 64, unsigned seed = 20240613);

}  // namespace hopflax

#endif
