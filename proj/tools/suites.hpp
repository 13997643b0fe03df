#ifndef HOPFLAX_TOOLS_SUITES_HPP
#define HOPFLAX_TOOLS_SUITES_HPP

#include <string>
#include <vector>

#include "hopflax/problem.hpp"

namespace hopflax::suites {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Run one named self-check suite against the loaded problem. Checks that do
/// not apply to the problem's shape report as passed with a "skipped" detail.
/// Valid names: oracle, residuals, terminal, monotonicity, properties.
std::vector<CheckLine> run_suite(const ProblemSpec& spec,
                                 const std::string& suite);

const std::vector<std::string>& suite_names();

}  // namespace hopflax::suites

#endif
