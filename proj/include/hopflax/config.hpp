#ifndef HOPFLAX_CONFIG_HPP
#define HOPFLAX_CONFIG_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "hopflax/problem.hpp"

namespace hopflax::config {

using json = nlohmann::ordered_json;

struct LoadedProblem {
  ProblemSpec spec;
  // Input with every default filled in, echoed into reports.
  json resolved;
};

/// Build a ProblemSpec from a JSON document. Unknown keys are rejected at
/// every level and all messages carry the offending path.
LoadedProblem load_problem(const json& doc);

LoadedProblem load_problem_file(const std::string& path);

}  // namespace hopflax::config

#endif
