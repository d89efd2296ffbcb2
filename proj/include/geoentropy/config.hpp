#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoentropy/entropy.hpp"
#include "geoentropy/zoo.hpp"

namespace geoentropy {

/// Point selection by coordinates: every point, a chart ball, a coordinate
/// box, or explicit ids.
struct PointPredicate {
  enum class Kind { all, ball, box, ids };

  Kind kind = Kind::all;
  Coords center;
  double radius = 0.0;
  Coords lo, hi;
  std::vector<PointId> ids;
};

std::vector<PointId> select_points(const SampledManifold& m, const PointPredicate& p);

struct LocalBlock {
  PointPredicate K, U, V;
};

/// Grids for the Bowen-Dinaburg reference estimate of an inner flow.
struct FlowBlock {
  std::vector<double> r_grid;
  std::vector<double> epsilon_grid;
  double time_step = 0.0;  // 0: mesh scale of the flow's manifold
  std::size_t fit_window = 0;
};

struct CheckParams {
  std::vector<double> gammas{2.0, 5.0};
  double zero_tolerance = 0.05;
  double vector_tolerance = 0.4;       // |h - 2 h_top|
  double flow_tolerance = 0.25;        // |h_top - known value|
  double additivity_tolerance = 0.15;  // relative
  double poisson_tolerance = 0.25;     // relative
  std::vector<double> rho_grid;        // empty: r grid
  bool spread = true;                  // zero-entropy: d_r constant in r up to snapping
};

struct OutputBlock {
  std::string dir = ".";
  std::string prefix = "geoentropy";
  bool matrices = false;
};

struct ExperimentConfig {
  StructureSpec structure;
  EntropyOptions entropy;
  std::optional<LocalBlock> local;
  std::optional<FlowBlock> flow;
  CheckParams checks;
  OutputBlock outputs;
};

/// Parses and validates JSON text. Errors are ConfigError naming the field.
ExperimentConfig parse_config(std::string_view text);

/// Reads `path`; validation messages are prefixed with "path:line:" where the
/// offending key can be located.
ExperimentConfig load_config(const std::string& path);

/// "exhaustive" or "beam:<width>".
SolveMode parse_mode(std::string_view text, std::uint64_t seed);

}  // namespace geoentropy
