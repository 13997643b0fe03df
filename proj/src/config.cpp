#include "hopflax/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "hopflax/errors.hpp"

namespace hopflax::config {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

const json& require_object(const json& node, const std::string& path) {
  if (!node.is_object()) {
    fail(path, "must be an object");
  }
  return node;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(path, "has unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(path + "." + key, "is required");
  }
  if (!it->is_number()) {
    fail(path + "." + key, "must be a number");
  }
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& path,
                     const std::string& key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return fallback;
  }
  if (!it->is_number()) {
    fail(path + "." + key, "must be a number");
  }
  return it->get<double>();
}

int get_int_or(const json& obj, const std::string& path,
               const std::string& key, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return fallback;
  }
  if (!it->is_number_integer()) {
    fail(path + "." + key, "must be an integer");
  }
  return it->get<int>();
}

std::string get_kind(const json& obj, const std::string& path) {
  const auto it = obj.find("kind");
  if (it == obj.end() || !it->is_string()) {
    fail(path + ".kind", "must be a string");
  }
  return it->get<std::string>();
}

std::vector<double> get_number_array(const json& node,
                                     const std::string& path) {
  if (!node.is_array() || node.empty()) {
    fail(path, "must be a non-empty array of numbers");
  }
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& item : node) {
    if (!item.is_number()) {
      fail(path, "must contain numbers only");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

void build_lagrangian(const json& node, int dim, ProblemSpec& spec,
                      json& resolved) {
  const std::string path = "lagrangian";
  require_object(node, path);
  const std::string kind = get_kind(node, path);
  json echo;
  echo["kind"] = kind;
  if (kind == "quadratic") {
    check_keys(node, path, {"kind", "q"});
    Matrix q_mat;
    const auto it = node.find("q");
    if (it == node.end() || it->is_number()) {
      const double q = it == node.end() ? 1.0 : it->get<double>();
      if (!(q > 0.0)) {
        fail(path + ".q", "must be positive");
      }
      q_mat = q * Matrix::Identity(dim, dim);
      echo["q"] = q;
    } else if (it->is_array()) {
      if (static_cast<int>(it->size()) != dim) {
        fail(path + ".q", "must have one row per dimension");
      }
      q_mat.resize(dim, dim);
      for (int r = 0; r < dim; ++r) {
        const std::vector<double> row = get_number_array(
            (*it)[static_cast<std::size_t>(r)], path + ".q");
        if (static_cast<int>(row.size()) != dim) {
          fail(path + ".q", "rows must have one entry per dimension");
        }
        for (int c = 0; c < dim; ++c) {
          q_mat(r, c) = row[static_cast<std::size_t>(c)];
        }
      }
      echo["q"] = *it;
    } else {
      fail(path + ".q", "must be a number or a matrix");
    }
    spec.lagrangian = LagrangianModel::quadratic(q_mat);
  } else if (kind == "power") {
    check_keys(node, path, {"kind", "p"});
    const double p = get_number(node, path, "p");
    spec.lagrangian = LagrangianModel::isotropic_power(p, dim);
    echo["p"] = p;
  } else {
    fail(path + ".kind", "must be 'quadratic' or 'power'");
  }
  resolved["lagrangian"] = echo;
}

void build_terminal(const json& node, int dim, ProblemSpec& spec,
                    json& resolved) {
  const std::string path = "terminal";
  require_object(node, path);
  const std::string kind = get_kind(node, path);
  json echo;
  echo["kind"] = kind;
  if (kind == "linear") {
    check_keys(node, path, {"kind", "a", "b"});
    const auto it = node.find("a");
    if (it == node.end()) {
      fail(path + ".a", "is required");
    }
    Vector a(dim);
    if (it->is_number()) {
      if (dim != 1) {
        fail(path + ".a", "must be an array when dim > 1");
      }
      a[0] = it->get<double>();
      echo["a"] = a[0];
    } else {
      const std::vector<double> vals = get_number_array(*it, path + ".a");
      if (static_cast<int>(vals.size()) != dim) {
        fail(path + ".a", "must have one entry per dimension");
      }
      for (int i = 0; i < dim; ++i) {
        a[i] = vals[static_cast<std::size_t>(i)];
      }
      echo["a"] = *it;
    }
    const double b = get_number_or(node, path, "b", 0.0);
    spec.terminal = TerminalModel::linear(a, b);
    echo["b"] = b;
  } else if (kind == "pseudo_huber") {
    check_keys(node, path, {"kind", "scale"});
    const double scale = get_number_or(node, path, "scale", 1.0);
    if (!(scale > 0.0)) {
      fail(path + ".scale", "must be positive");
    }
    spec.terminal = TerminalModel::pseudo_huber(scale, dim);
    echo["scale"] = scale;
  } else {
    fail(path + ".kind", "must be 'linear' or 'pseudo_huber'");
  }
  resolved["terminal"] = echo;
}

void build_discount(const json& node, double horizon, ProblemSpec& spec,
                    json& resolved) {
  const std::string path = "discount";
  require_object(node, path);
  const std::string kind = get_kind(node, path);
  json echo;
  echo["kind"] = kind;
  if (kind == "exponential_rate") {
    check_keys(node, path, {"kind", "rho"});
    const auto it = node.find("rho");
    if (it == node.end()) {
      fail(path + ".rho", "is required");
    }
    if (it->is_number()) {
      const double rho = it->get<double>();
      if (!(rho >= 0.0)) {
        fail(path + ".rho", "must be nonnegative");
      }
      spec.discount = DiscountModel::exponential_constant(rho, horizon);
      echo["rho"] = rho;
    } else if (it->is_object()) {
      check_keys(*it, path + ".rho", {"breakpoints", "values"});
      const auto bp_it = it->find("breakpoints");
      const auto val_it = it->find("values");
      if (bp_it == it->end() || val_it == it->end()) {
        fail(path + ".rho", "needs both breakpoints and values");
      }
      const std::vector<double> bp =
          get_number_array(*bp_it, path + ".rho.breakpoints");
      const std::vector<double> vals =
          get_number_array(*val_it, path + ".rho.values");
      spec.discount =
          DiscountModel::exponential_piecewise_linear(bp, vals, horizon);
      echo["rho"] = *it;
    } else {
      fail(path + ".rho",
           "must be a number or an object with breakpoints and values");
    }
  } else if (kind == "elapsed_time") {
    check_keys(node, path, {"kind", "family", "k"});
    std::string family = "hyperbolic";
    const auto it = node.find("family");
    if (it != node.end()) {
      if (!it->is_string()) {
        fail(path + ".family", "must be a string");
      }
      family = it->get<std::string>();
    }
    if (family != "hyperbolic") {
      fail(path + ".family", "must be 'hyperbolic'");
    }
    const double k = get_number_or(node, path, "k", 1.0);
    if (!(k > 0.0)) {
      fail(path + ".k", "must be positive");
    }
    spec.discount = DiscountModel::hyperbolic(k, horizon);
    echo["family"] = family;
    echo["k"] = k;
  } else {
    fail(path + ".kind", "must be 'exponential_rate' or 'elapsed_time'");
  }
  resolved["discount"] = echo;
}

void build_numerics(const json* node, ProblemSpec& spec, json& resolved) {
  const std::string path = "numerics";
  json empty = json::object();
  const json& obj = node != nullptr ? require_object(*node, path) : empty;
  check_keys(obj, path,
             {"quadrature", "minimize", "finite_diff", "terminal_eps"});

  json quad = json::object();
  if (const auto it = obj.find("quadrature"); it != obj.end()) {
    quad = require_object(*it, path + ".quadrature");
    check_keys(quad, path + ".quadrature", {"panels", "order", "abs_tol"});
  }
  spec.quad.panels =
      get_int_or(quad, path + ".quadrature", "panels", spec.quad.panels);
  spec.quad.order =
      get_int_or(quad, path + ".quadrature", "order", spec.quad.order);
  spec.quad.abs_tol = get_number_or(quad, path + ".quadrature", "abs_tol",
                                    spec.quad.abs_tol);
  if (spec.quad.panels < 1) {
    fail(path + ".quadrature.panels", "must be at least 1");
  }
  if (spec.quad.order != 4 && spec.quad.order != 8 && spec.quad.order != 16) {
    fail(path + ".quadrature.order", "must be 4, 8, or 16");
  }

  json mini = json::object();
  if (const auto it = obj.find("minimize"); it != obj.end()) {
    mini = require_object(*it, path + ".minimize");
    check_keys(mini, path + ".minimize",
               {"grad_tol", "max_iter", "multistart", "radius", "tie_tol"});
  }
  spec.minimize.grad_tol = get_number_or(mini, path + ".minimize", "grad_tol",
                                         spec.minimize.grad_tol);
  spec.minimize.max_iter = get_int_or(mini, path + ".minimize", "max_iter",
                                      spec.minimize.max_iter);
  spec.minimize.multistart = get_int_or(mini, path + ".minimize", "multistart",
                                        spec.minimize.multistart);
  spec.minimize.radius = get_number_or(mini, path + ".minimize", "radius",
                                       spec.minimize.radius);
  spec.minimize.tie_tol = get_number_or(mini, path + ".minimize", "tie_tol",
                                        spec.minimize.tie_tol);
  if (!(spec.minimize.grad_tol > 0.0)) {
    fail(path + ".minimize.grad_tol", "must be positive");
  }
  if (spec.minimize.max_iter < 1 || spec.minimize.multistart < 1) {
    fail(path + ".minimize", "needs max_iter >= 1 and multistart >= 1");
  }

  json fd = json::object();
  if (const auto it = obj.find("finite_diff"); it != obj.end()) {
    fd = require_object(*it, path + ".finite_diff");
    check_keys(fd, path + ".finite_diff", {"step"});
  }
  spec.finite_diff.step = get_number_or(fd, path + ".finite_diff", "step",
                                        spec.finite_diff.step);
  if (!(spec.finite_diff.step > 0.0)) {
    fail(path + ".finite_diff.step", "must be positive");
  }

  spec.terminal_eps =
      get_number_or(obj, path, "terminal_eps", spec.terminal_eps);
  if (!(spec.terminal_eps > 0.0)) {
    fail(path + ".terminal_eps", "must be positive");
  }

  json echo;
  echo["quadrature"] = {{"panels", spec.quad.panels},
                        {"order", spec.quad.order},
                        {"abs_tol", spec.quad.abs_tol}};
  echo["minimize"] = {{"grad_tol", spec.minimize.grad_tol},
                      {"max_iter", spec.minimize.max_iter},
                      {"multistart", spec.minimize.multistart},
                      {"radius", spec.minimize.radius},
                      {"tie_tol", spec.minimize.tie_tol}};
  echo["finite_diff"] = {{"step", spec.finite_diff.step}};
  echo["terminal_eps"] = spec.terminal_eps;
  resolved["numerics"] = echo;
}

}  // namespace

LoadedProblem load_problem(const json& doc) {
  require_object(doc, "top level");
  check_keys(doc, "top level",
             {"dim", "horizon", "lagrangian", "terminal", "discount",
              "numerics"});

  LoadedProblem out;
  out.spec.dim = get_int_or(doc, "top level", "dim", 1);
  if (out.spec.dim < 1) {
    fail("dim", "must be at least 1");
  }
  out.spec.horizon = get_number(doc, "top level", "horizon");
  if (!(out.spec.horizon > 0.0)) {
    fail("horizon", "must be positive");
  }
  out.resolved["dim"] = out.spec.dim;
  out.resolved["horizon"] = out.spec.horizon;

  const auto lag = doc.find("lagrangian");
  if (lag == doc.end()) {
    fail("lagrangian", "is required");
  }
  build_lagrangian(*lag, out.spec.dim, out.spec, out.resolved);

  const auto term = doc.find("terminal");
  if (term == doc.end()) {
    fail("terminal", "is required");
  }
  build_terminal(*term, out.spec.dim, out.spec, out.resolved);

  const auto disc = doc.find("discount");
  if (disc == doc.end()) {
    fail("discount", "is required");
  }
  build_discount(*disc, out.spec.horizon, out.spec, out.resolved);

  const auto num = doc.find("numerics");
  build_numerics(num == doc.end() ? nullptr : &*num, out.spec, out.resolved);

  validate_spec(out.spec);
  return out;
}

LoadedProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return load_problem(doc);
}

}  // namespace hopflax::config
