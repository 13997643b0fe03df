#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hopflax/convex.hpp"
#include "hopflax/errors.hpp"

using hopflax::conjugate;
using hopflax::DomainError;
using hopflax::iota;
using hopflax::LagrangianModel;
using hopflax::Matrix;
using hopflax::validate_lagrangian;
using hopflax::Vector;

TEST_CASE("quadratic model evaluates value gradient and conjugate") {
  Matrix q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  const LagrangianModel lag = LagrangianModel::quadratic(q);

  Vector u(2);
  u << 1.0, -2.0;
  CHECK(lag.value(u) == doctest::Approx(0.5 * u.dot(q * u)).epsilon(1e-15));
  CHECK((lag.gradient(u) - q * u).norm() <= 1e-14);
  CHECK((lag.hessian(u) - q).norm() <= 1e-14);

  // Inverting the gradient recovers the point.
  const Vector back = iota(lag, q * u);
  CHECK((back - u).lpNorm<Eigen::Infinity>() <= 1e-12);

  Vector p(2);
  p << 0.3, -0.7;
  const Vector qinv_p = q.ldlt().solve(p);
  CHECK(conjugate(lag, p) == doctest::Approx(0.5 * p.dot(qinv_p)).epsilon(1e-13));
}

TEST_CASE("quadratic factory rejects bad matrices") {
  Matrix asym(2, 2);
  asym << 1.0, 0.2, -0.2, 1.0;
  CHECK_THROWS_AS(LagrangianModel::quadratic(asym), DomainError);

  Matrix indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(LagrangianModel::quadratic(indef), DomainError);
}

TEST_CASE("power model matches scalar closed forms") {
  for (const double p : {1.5, 3.0}) {
    const LagrangianModel lag = LagrangianModel::isotropic_power(p, 1);
    Vector u(1);
    u << -1.7;
    CHECK(lag.value(u) ==
          doctest::Approx(std::pow(1.7, p) / p).epsilon(1e-14));
    CHECK(lag.gradient(u)[0] ==
          doctest::Approx(-std::pow(1.7, p - 1.0)).epsilon(1e-14));

    // grad l(u) = |u|^{p-2} u, so its inverse is q |q|^{(2-p)/(p-1)}.
    Vector q(1);
    q << 4.0;
    const double expect = std::pow(4.0, 1.0 / (p - 1.0));
    CHECK(iota(lag, q)[0] == doctest::Approx(expect).epsilon(1e-13));

    // Conjugate of |u|^p / p is |q|^{p'} / p' with 1/p + 1/p' = 1.
    const double pc = p / (p - 1.0);
    CHECK(conjugate(lag, q) ==
          doctest::Approx(std::pow(4.0, pc) / pc).epsilon(1e-13));
  }
  CHECK_THROWS_AS(LagrangianModel::isotropic_power(1.0, 1), DomainError);
}

TEST_CASE("power model handles the origin") {
  const LagrangianModel lag = LagrangianModel::isotropic_power(1.5, 2);
  const Vector z = Vector::Zero(2);
  CHECK(lag.value(z) == 0.0);
  CHECK(lag.gradient(z).norm() == 0.0);
  CHECK(iota(lag, z).norm() == 0.0);
  CHECK(conjugate(lag, z) == 0.0);
}

TEST_CASE("custom model inverts its gradient by newton iteration") {
  auto value = [](const Vector& u) {
    return std::cosh(u[0]) - 1.0 + 0.5 * u[1] * u[1];
  };
  auto gradient = [](const Vector& u) -> Vector {
    Vector g(2);
    g << std::sinh(u[0]), u[1];
    return g;
  };
  auto hessian = [](const Vector& u) -> Matrix {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = std::cosh(u[0]);
    h(1, 1) = 1.0;
    return h;
  };
  const LagrangianModel lag =
      LagrangianModel::custom(2, value, gradient, hessian);

  Vector u(2);
  u << 1.7, -0.4;
  const Vector back = iota(lag, gradient(u));
  CHECK((back - u).lpNorm<Eigen::Infinity>() <= 1e-9);

  // Fenchel equality at p = grad l(u).
  const Vector p = gradient(u);
  CHECK(lag.value(u) + conjugate(lag, p) ==
        doctest::Approx(p.dot(u)).epsilon(1e-9));
}

TEST_CASE("fenchel young inequality holds on a sample sweep") {
  const LagrangianModel lag = LagrangianModel::isotropic_power(1.5, 2);
  for (int i = 0; i < 50; ++i) {
    Vector u(2);
    u << -2.0 + 4.0 * (i % 10) / 9.0, -2.0 + 4.0 * (i / 10) / 4.0;
    Vector p(2);
    p << 1.3 - 0.11 * i, -0.8 + 0.07 * i;
    CHECK(lag.value(u) + conjugate(lag, p) - p.dot(u) >= -1e-9);
  }
}

TEST_CASE("builtin models pass validation") {
  Matrix q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  CHECK(validate_lagrangian(LagrangianModel::quadratic(q)).ok);
  CHECK(validate_lagrangian(LagrangianModel::isotropic_power(1.5, 1)).ok);
  CHECK(validate_lagrangian(LagrangianModel::isotropic_power(3.0, 2)).ok);
}

TEST_CASE("validation flags a non-convex candidate") {
  auto value = [](const Vector& u) { return -u.squaredNorm(); };
  auto gradient = [](const Vector& u) -> Vector { return -2.0 * u; };
  auto hessian = [](const Vector& u) -> Matrix {
    return -2.0 * Matrix::Identity(u.size(), u.size());
  };
  const LagrangianModel bad =
      LagrangianModel::custom(2, value, gradient, hessian);
  CHECK_FALSE(validate_lagrangian(bad).ok);
}
