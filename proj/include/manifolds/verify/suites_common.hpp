#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "manifolds/verify/report.hpp"

namespace manifolds::verify {

struct SuiteContext {
  SuiteDims dims;
  int trials = 0;
  std::uint64_t seed = 0;
  const std::map<std::string, double>* tolerances = nullptr;

  double tol(const std::string& name) const { return tolerances->at(name); }

  // Reduced trial count for the stability pass at enlarged truncation.
  int stability_trials() const { return std::max(trials / 4, 16); }
};

}  // namespace manifolds::verify
