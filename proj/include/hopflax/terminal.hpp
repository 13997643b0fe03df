#ifndef HOPFLAX_TERMINAL_HPP
#define HOPFLAX_TERMINAL_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "hopflax/errors.hpp"
#include "hopflax/validation.hpp"

namespace hopflax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class TerminalKind { Linear, PseudoHuber, Custom };

/// Terminal payoff g. Globally Lipschitz for the built-ins; gradient and
/// Hessian callbacks are optional for Custom and drive which solver paths
/// (analytic first-order conditions, Newton oracles) are available.
struct TerminalModel {
  TerminalKind kind = TerminalKind::Custom;
  int dim = 0;

  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;  // optional
  std::function<Matrix(const Vector&)> hessian;   // optional

  std::optional<double> lip_const;
  bool convex = false;

  static TerminalModel linear(const Vector& a, double b);
  /// g(x) = scale^2 (sqrt(1 + |x|^2/scale^2) - 1): quadratic near zero,
  /// asymptotically |x|*scale, everywhere smooth and convex.
  static TerminalModel pseudo_huber(double scale, int dim);
  static TerminalModel custom(int dim,
                              std::function<double(const Vector&)> value,
                              std::function<Vector(const Vector&)> gradient,
                              std::function<Matrix(const Vector&)> hessian,
                              std::optional<double> lip_const, bool convex);
};

ValidationReport validate_terminal(const TerminalModel& model, int samples = 64,
                                   unsigned seed = 20240613);

}  // namespace hopflax

#endif
