#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopflax/analysis.hpp"
#include "hopflax/config.hpp"
#include "hopflax/errors.hpp"
#include "hopflax/format.hpp"
#include "hopflax/solver.hpp"
#include "suites.hpp"

namespace {

using hopflax::Vector;
using hopflax::format::double_repr;
using json = hopflax::config::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int env_threads() {
  const char* raw = std::getenv("HOPFLAX_THREADS");
  if (raw == nullptr || *raw == '\0') {
    return 1;
  }
  try {
    return std::max(0, std::stoi(raw));
  } catch (const std::exception&) {
    throw hopflax::ConfigError("HOPFLAX_THREADS must be an integer");
  }
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw hopflax::ConfigError("cannot open output file '" + out_path + "'");
  }
  out << text;
}

Vector to_vector(const std::vector<double>& values, int dim,
                 const std::string& flag) {
  if (static_cast<int>(values.size()) != dim) {
    throw hopflax::ConfigError(flag + " needs exactly " +
                               std::to_string(dim) + " value(s)");
  }
  Vector x(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = values[static_cast<std::size_t>(i)];
  }
  return x;
}

// Broadcast a per-axis flag: one value applies to every axis, otherwise one
// value per axis is required.
std::vector<double> per_axis(const std::vector<double>& values, int dim,
                             const std::string& flag) {
  if (values.size() == 1) {
    return std::vector<double>(static_cast<std::size_t>(dim), values[0]);
  }
  if (static_cast<int>(values.size()) == dim) {
    return values;
  }
  throw hopflax::ConfigError(flag + " needs 1 or " + std::to_string(dim) +
                             " value(s)");
}

std::vector<int> per_axis_int(const std::vector<int>& values, int dim,
                              const std::string& flag) {
  if (values.size() == 1) {
    return std::vector<int>(static_cast<std::size_t>(dim), values[0]);
  }
  if (static_cast<int>(values.size()) == dim) {
    return values;
  }
  throw hopflax::ConfigError(flag + " needs 1 or " + std::to_string(dim) +
                             " value(s)");
}

std::vector<double> linspace(double lo, double hi, int count,
                             const std::string& flag) {
  if (count < 1) {
    throw hopflax::ConfigError(flag + " count must be at least 1");
  }
  if (count > 1 && !(hi >= lo)) {
    throw hopflax::ConfigError(flag + " needs max >= min");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

void append_axis_header(std::ostringstream& os, const std::string& base,
                        int dim) {
  for (int i = 0; i < dim; ++i) {
    if (dim == 1) {
      os << base;
    } else {
      os << base << i;
    }
    os << (i + 1 < dim ? "," : "");
  }
}

int cmd_value(const hopflax::config::LoadedProblem& problem,
              const std::vector<double>& x_raw, double t,
              const std::string& out_path) {
  const hopflax::ProblemSpec& spec = problem.spec;
  const Vector x = to_vector(x_raw, spec.dim, "--x");
  const hopflax::SolveResult sol = hopflax::hopf_lax_value(spec, x, t);

  json report;
  report["config"] = problem.resolved;
  report["x"] = vector_json(x);
  report["t"] = t;
  report["v"] = sol.v;
  report["alpha"] = vector_json(sol.alpha);
  report["p"] = vector_json(sol.p);
  report["foc_residual"] = sol.foc_residual;
  report["diagnostics"] = {{"starts_used", sol.starts_used},
                           {"iterations", sol.iterations},
                           {"n_tied", sol.n_tied},
                           {"tie_spread", sol.tie_spread}};
  emit(out_path, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_grid(const hopflax::config::LoadedProblem& problem,
             const std::vector<double>& x_min_raw,
             const std::vector<double>& x_max_raw,
             const std::vector<int>& x_count_raw, double t_min, double t_max,
             int t_count, bool residuals, const std::string& out_path) {
  const hopflax::ProblemSpec& spec = problem.spec;
  const std::vector<double> x_min = per_axis(x_min_raw, spec.dim, "--x-min");
  const std::vector<double> x_max = per_axis(x_max_raw, spec.dim, "--x-max");
  const std::vector<int> x_count =
      per_axis_int(x_count_raw, spec.dim, "--x-count");

  std::vector<std::vector<double>> axes;
  axes.reserve(static_cast<std::size_t>(spec.dim));
  for (int a = 0; a < spec.dim; ++a) {
    axes.push_back(linspace(x_min[static_cast<std::size_t>(a)],
                            x_max[static_cast<std::size_t>(a)],
                            x_count[static_cast<std::size_t>(a)], "--x"));
  }
  const std::vector<double> ts = linspace(t_min, t_max, t_count, "--t");

  hopflax::analysis::GridOptions opts;
  opts.residuals = residuals;
  opts.threads = env_threads();
  const hopflax::analysis::GridResult grid =
      hopflax::analysis::grid_eval(spec, axes, ts, opts);

  const bool with_diss =
      residuals && spec.discount.kind == hopflax::DiscountKind::ExponentialRate;
  std::ostringstream os;
  os << "# config: " << problem.resolved.dump() << "\n";
  append_axis_header(os, "x", spec.dim);
  os << ",t,v,";
  append_axis_header(os, "alpha", spec.dim);
  os << ",";
  append_axis_header(os, "v_x", spec.dim);
  os << ",v_t";
  if (residuals) {
    os << ",dp_residual";
    if (with_diss) {
      os << ",dissipation_residual";
    }
  }
  os << "\n";
  for (const auto& pt : grid.points) {
    for (int i = 0; i < spec.dim; ++i) {
      os << double_repr(pt.x[i]) << ",";
    }
    os << double_repr(pt.t) << "," << double_repr(pt.v) << ",";
    for (int i = 0; i < spec.dim; ++i) {
      os << double_repr(pt.alpha[i]) << ",";
    }
    for (int i = 0; i < spec.dim; ++i) {
      os << double_repr(pt.v_x[i]) << ",";
    }
    os << double_repr(pt.v_t);
    if (residuals) {
      os << "," << double_repr(pt.dp_residual);
      if (with_diss) {
        os << "," << double_repr(pt.dissipation_residual);
      }
    }
    os << "\n";
  }
  emit(out_path, os.str());
  return kExitOk;
}

int cmd_arc(const hopflax::config::LoadedProblem& problem,
            const std::vector<double>& x_raw, double t, int samples,
            const std::string& out_path) {
  const hopflax::ProblemSpec& spec = problem.spec;
  const Vector x = to_vector(x_raw, spec.dim, "--x");
  const hopflax::Arc arc = hopflax::optimal_arc(spec, x, t, samples);

  std::ostringstream os;
  os << "# config: " << problem.resolved.dump() << "\n";
  os << "# cost: " << double_repr(arc.cost) << "\n";
  os << "s,";
  append_axis_header(os, "y", spec.dim);
  os << ",";
  append_axis_header(os, "u", spec.dim);
  os << "\n";
  for (std::size_t i = 0; i < arc.times.size(); ++i) {
    os << double_repr(arc.times[i]);
    for (int a = 0; a < spec.dim; ++a) {
      os << "," << double_repr(arc.positions[i][a]);
    }
    for (int a = 0; a < spec.dim; ++a) {
      os << "," << double_repr(arc.velocities[i][a]);
    }
    os << "\n";
  }
  emit(out_path, os.str());
  return kExitOk;
}

int cmd_check(const hopflax::config::LoadedProblem& problem,
              const std::string& suite, const std::string& out_path) {
  const auto lines = hopflax::suites::run_suite(problem.spec, suite);
  std::ostringstream os;
  int failed = 0;
  for (const auto& line : lines) {
    os << (line.pass ? "[PASS] " : "[FAIL] ") << suite << "." << line.name
       << ": " << line.detail << "\n";
    if (!line.pass) {
      ++failed;
    }
  }
  os << "suite " << suite << ": " << (lines.size() - failed) << "/"
     << lines.size() << " checks passed\n";
  emit(out_path, os.str());
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted Hopf-Lax value solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<double> x_raw;
  double t = 0.0;

  CLI::App* value = app.add_subcommand("value", "Solve one point");
  value->add_option("--config", config_path, "Problem JSON")->required();
  value->add_option("--x", x_raw, "State, comma separated")
      ->required()
      ->delimiter(',');
  value->add_option("--t", t, "Time")->required();
  value->add_option("--out", out_path, "Write the JSON report here");

  std::vector<double> x_min{-1.0};
  std::vector<double> x_max{1.0};
  std::vector<int> x_count{21};
  double t_min = 0.0;
  double t_max = 0.0;
  int t_count = 1;
  bool residuals = false;

  CLI::App* grid = app.add_subcommand("grid", "Sweep a tensor grid");
  grid->add_option("--config", config_path, "Problem JSON")->required();
  grid->add_option("--x-min", x_min, "Axis minima")->delimiter(',');
  grid->add_option("--x-max", x_max, "Axis maxima")->delimiter(',');
  grid->add_option("--x-count", x_count, "Axis sizes")->delimiter(',');
  grid->add_option("--t-min", t_min, "First t")->required();
  grid->add_option("--t-max", t_max, "Last t");
  grid->add_option("--t-count", t_count, "Number of t values");
  grid->add_flag("--residuals", residuals,
                 "Also emit value-equation residual columns");
  grid->add_option("--out", out_path, "Write the CSV here");

  int samples = 65;
  CLI::App* arc = app.add_subcommand("arc", "Sample the minimizing arc");
  arc->add_option("--config", config_path, "Problem JSON")->required();
  arc->add_option("--x", x_raw, "State, comma separated")
      ->required()
      ->delimiter(',');
  arc->add_option("--t", t, "Time")->required();
  arc->add_option("--samples", samples, "Number of samples along the arc");
  arc->add_option("--out", out_path, "Write the CSV here");

  std::string suite;
  CLI::App* check = app.add_subcommand("check", "Run a self-check suite");
  check->add_option("--config", config_path, "Problem JSON")->required();
  check->add_option("--suite", suite, "One of: oracle, residuals, terminal, "
                    "monotonicity, properties")
      ->required();
  check->add_option("--out", out_path, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const hopflax::config::LoadedProblem problem =
        hopflax::config::load_problem_file(config_path);
    if (value->parsed()) {
      return cmd_value(problem, x_raw, t, out_path);
    }
    if (grid->parsed()) {
      if (grid->count("--t-max") == 0) {
        t_max = t_min;
      }
      return cmd_grid(problem, x_min, x_max, x_count, t_min, t_max, t_count,
                      residuals, out_path);
    }
    if (arc->parsed()) {
      return cmd_arc(problem, x_raw, t, samples, out_path);
    }
    return cmd_check(problem, suite, out_path);
  } catch (const hopflax::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hopflax::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hopflax::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const hopflax::NonFiniteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
