#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geoentropy/entropy.hpp"

namespace geoentropy {

/// Shortest decimal that reads back to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_number(double v);

/// Columns r, epsilon, N, method, ln_N_over_r.
void write_counts_csv(std::ostream& out, const std::vector<SeparatedCount>& counts);

/// One comment line "# kind=... r=... T=... mode=... width=... seed=..." with
/// the exactness tally, then a header row of ids and one row per id.
void write_matrix_csv(std::ostream& out, const PursuitMatrix& matrix);

struct RunInfo {
  std::string structure;
  std::vector<double> r_grid;
  std::vector<double> epsilon_grid;
  std::size_t steps = 0;
  SolveMode mode;
  CountMethod method = CountMethod::greedy;
};

/// JSON summary of an estimate: slopes, h, H and diagnostics.
std::string summary_json(const EntropyEstimate& estimate, const RunInfo& info);

}  // namespace geoentropy
