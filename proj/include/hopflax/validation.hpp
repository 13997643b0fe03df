#ifndef HOPFLAX_VALIDATION_HPP
#define HOPFLAX_VALIDATION_HPP

#include <string>

namespace hopflax {

/// Outcome of a sampled model self-check.
struct ValidationReport {
  bool ok = true;
  std::string detail;
};

}  // namespace hopflax

#endif
