#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geoentropy/pursuit.hpp"

namespace geoentropy {

enum class CountMethod { exact, greedy };

std::string_view to_string(CountMethod m);

/// Components of the "closer than epsilon" graph larger than this are refused
/// by the exact counter.
inline constexpr std::size_t kExactComponentLimit = 64;

struct SeparatedCount {
  double r = 0.0;
  double epsilon = 0.0;
  std::size_t count = 0;
  CountMethod method = CountMethod::greedy;
};

/// Size of a maximal epsilon-separated subset of the n x n matrix. Greedy
/// inserts ids in order; exact solves maximum independent set per connected
/// component of the graph of pairs closer than epsilon.
std::size_t max_separated(std::span<const double> matrix, std::size_t n, double epsilon,
                          CountMethod method);

SeparatedCount max_separated(const PursuitMatrix& matrix, double epsilon, CountMethod method);

struct SlopeFit {
  double epsilon = 0.0;
  double slope = 0.0;      // clamped at 0
  double raw_slope = 0.0;  // least-squares slope before clamping
  double residual = 0.0;   // RMS residual of ln N
  double r_first = 0.0;    // fit window
  double r_last = 0.0;
  std::size_t points = 0;
  bool saturated = false;  // fewer than 3 counts below the saturation limit
};

/// Least-squares slope of ln N against r over the last `window` distinct r
/// values (0: the upper half of the grid, at least 3 points). Counts above
/// `saturation_limit` (0: no limit) are left out; when fewer than 3 remain
/// the window is taken over all counts and the fit is marked saturated.
SlopeFit entropy_from_counts(std::span<const SeparatedCount> counts, std::size_t window = 0,
                             std::size_t saturation_limit = 0);

/// Fraction of the point count above which a separated count is treated as
/// saturated by the pipelines.
inline constexpr double kDefaultSaturation = 0.25;

struct EntropyOptions {
  std::vector<double> r_grid;
  std::vector<double> epsilon_grid;
  std::size_t steps = 2;
  SolveMode mode;
  MatrixOptions matrix;
  CountMethod method = CountMethod::greedy;
  std::size_t fit_window = 0;
  double saturation = kDefaultSaturation;
  bool compute_D = false;
  /// Speeds at which the Lemma constant is sampled; empty uses r_grid.
  std::vector<double> lemma_rho;
  bool keep_matrices = false;
};

struct EntropyDiagnostics {
  std::size_t points = 0;
  double lemma_constant = 0.0;
  double floor = 0.0;  // smallest trustworthy epsilon
  std::vector<std::size_t> dropped_edges;  // per r
  std::vector<std::size_t> max_out_degree;  // per r
  std::vector<double> snap_error;            // per r, largest realized snap distance
  std::size_t exact_pairs = 0;
  std::size_t lower_bound_pairs = 0;
  std::size_t capped_pairs = 0;
  bool all_exact = true;
  /// D_r only: pairs with D_r > d_r.
  std::size_t D_above_d = 0;
  std::size_t leaves = 0;
};

struct EntropyEstimate {
  std::vector<SeparatedCount> counts;    // r-major, then epsilon
  std::vector<SeparatedCount> counts_D;  // empty unless D_r was computed
  std::vector<SlopeFit> profile;         // per epsilon
  std::vector<SlopeFit> profile_D;
  double h = 0.0;
  std::optional<double> H;
  double headline_epsilon = 0.0;
  bool local = false;
  EntropyDiagnostics diagnostics;
  std::vector<PursuitMatrix> matrices;  // kept on request
  std::vector<PursuitMatrix> matrices_D;
};

EntropyEstimate estimate_entropy(const GeometricStructure& g, const EntropyOptions& options);

/// Counts over the points of U with evaders confined to U and pursuers to V.
EntropyEstimate local_entropy(const GeometricStructure& g, std::span<const PointId> K,
                              std::span<const PointId> U, std::span<const PointId> V,
                              const EntropyOptions& options);

/// Index of the headline epsilon in `profile`: the largest slope among
/// unsaturated fits at or above the floor, else the first fit above the floor.
std::size_t headline_index(std::span<const SlopeFit> profile, double floor);

struct FlowEstimate {
  std::vector<SeparatedCount> counts;
  std::vector<SlopeFit> profile;
  double h_top = 0.0;
  double headline_epsilon = 0.0;
  double time_step = 0.0;
  double max_snap_error = 0.0;
};

struct FlowOptions {
  std::vector<double> r_grid;
  std::vector<double> epsilon_grid;
  /// Flow time per iterate of the sampled flow map.
  double time_step = 0.0;
  double snap_tolerance = -1.0;  // negative: mesh scale
  CountMethod method = CountMethod::greedy;
  std::size_t fit_window = 0;
  double saturation = kDefaultSaturation;
};

/// Sampled time-dt flow map of X (one straight chart step, snapped).
std::vector<PointId> flow_map(const SampledManifold& m, const VectorField& field, double dt,
                              double snap_tolerance, double* max_snap_error = nullptr);

/// Topological entropy of the flow of X from separated sets of the metric
/// max_{0 <= t <= r} d(phi^t x, phi^t y) along the sampled flow map.
FlowEstimate bowen_dinaburg(const SampledManifold& m, const VectorField& field,
                            const FlowOptions& options);

/// sup over rho and over T-step walks z at budget rho of d(z_T, z_0) / rho.
double lemma_constant(const GeometricStructure& g, std::size_t steps, std::span<const double> rho_grid,
                      const MoveOptions& options = {});

/// Smallest rho in the grid at which y is reachable from x by a T-step walk;
/// nullopt when it is not reachable at any grid speed.
std::optional<double> reach_speed(const GeometricStructure& g, PointId x, PointId y, std::size_t steps,
                                  std::span<const double> rho_grid, const MoveOptions& options = {});

}  // namespace geoentropy
