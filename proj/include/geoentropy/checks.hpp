#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geoentropy/config.hpp"

namespace geoentropy {

struct CheckAssertion {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct CheckReport {
  std::string suite;
  std::string structure;
  std::vector<CheckAssertion> assertions;
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool passed() const;
};

/// metric-axioms, homogeneity, additivity, zero-entropy, vector-theorem,
/// poisson, lemma-bound.
const std::vector<std::string>& check_suites();

/// Runs one suite on the structure and grids of `config`. Unknown suites and
/// structures the suite cannot use are ConfigErrors.
CheckReport run_check(std::string_view suite, const ExperimentConfig& config);

std::string check_report_json(const CheckReport& report);

}  // namespace geoentropy
