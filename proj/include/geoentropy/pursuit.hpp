#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geoentropy/paths.hpp"

namespace geoentropy {

/// exact: the value is the exact discrete sup-inf.
/// lower_bound: beam search, the exact value is at least this.
/// capped: the search stopped once the value reached the matrix cutoff.
enum class Exactness : std::uint8_t { exact, lower_bound, capped };

enum class MatrixKind { d_r, D_r, local_d_r };

std::string_view to_string(Exactness e);
std::string_view to_string(MatrixKind k);

struct SolveMode {
  enum class Kind { exhaustive, beam };

  Kind kind = Kind::exhaustive;
  std::size_t width = 0;
  std::uint64_t seed = 0;
  std::size_t budget = kEnumerationBudget;

  static SolveMode exhaustive() { return {}; }
  static SolveMode beam(std::size_t width, std::uint64_t seed = 0) {
    return {Kind::beam, width, seed, kEnumerationBudget};
  }
  bool is_beam() const noexcept { return kind == Kind::beam; }
};

/// Evader paths stay in `evader`, pursuer paths in `pursuer`. Empty masks do
/// not constrain.
struct Confinement {
  PointMask evader;
  PointMask pursuer;
};

struct PursuitResult {
  double value = 0.0;
  Exactness exactness = Exactness::exact;
};

/// min over pursuer walks mu from y of max_k d(gamma_k, mu_k), by bottleneck
/// dynamic programming over (time, pursuer node).
double pursuit_value(std::span<const PointId> gamma, PointId y, const MoveGraph& pursuer,
                     const PointMask& confine_pursuer = {});

/// Discrete delta_r(x, y): how far an evader from x can get from a pursuer
/// starting at y. The search stops early once the value reaches `cutoff`.
PursuitResult delta_r(PointId x, PointId y, const MoveGraph& evader, const MoveGraph& pursuer,
                      const SolveMode& mode, const Confinement& confinement = {},
                      double cutoff = std::numeric_limits<double>::infinity());

/// Symmetric matrix of pairwise (pseudo)distances over `ids`.
class PursuitMatrix {
 public:
  PursuitMatrix() = default;
  PursuitMatrix(MatrixKind kind, double r, std::size_t steps, SolveMode mode, std::vector<PointId> ids);

  MatrixKind kind() const noexcept { return kind_; }
  double r() const noexcept { return r_; }
  std::size_t steps() const noexcept { return steps_; }
  const SolveMode& mode() const noexcept { return mode_; }
  double cutoff() const noexcept { return cutoff_; }
  void set_cutoff(double c) noexcept { cutoff_ = c; }

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<PointId>& ids() const noexcept { return ids_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  Exactness exactness(std::size_t i, std::size_t j) const { return flags_[i * size() + j]; }
  void set(std::size_t i, std::size_t j, double v, Exactness e);

  bool all_exact() const;
  std::size_t count(Exactness e) const;
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  MatrixKind kind_ = MatrixKind::d_r;
  double r_ = 0.0;
  std::size_t steps_ = 0;
  SolveMode mode_;
  double cutoff_ = std::numeric_limits<double>::infinity();
  std::vector<PointId> ids_;
  std::vector<double> values_;
  std::vector<Exactness> flags_;
};

struct MatrixOptions {
  MoveOptions moves;
  /// Pairs whose value provably reaches the cutoff are not solved further.
  double cutoff = std::numeric_limits<double>::infinity();
  std::size_t jobs = 1;
  /// D_r only: pursuer budget; nullopt is unbounded (same-leaf jumps).
  std::optional<double> pursuer_speed;
  /// D_r only: leaves for the unbounded pursuer come from the move graph at
  /// max(r, leaf_probe_r).
  double leaf_probe_r = 0.0;
};

/// Fills sym(delta(x, y) + delta(y, x)) over `ids` for the given graphs.
PursuitMatrix pursuit_matrix(MatrixKind kind, const MoveGraph& evader, const MoveGraph& pursuer,
                             std::vector<PointId> ids, const SolveMode& mode,
                             const MatrixOptions& options = {}, const Confinement& confinement = {});

PursuitMatrix d_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                         const SolveMode& mode, const MatrixOptions& options = {});

PursuitMatrix D_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                         const SolveMode& mode, const MatrixOptions& options = {});

/// Evader confined to U, pursuer to V; rows and columns are the points of U.
PursuitMatrix local_d_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                               std::span<const PointId> U, std::span<const PointId> V,
                               const SolveMode& mode, const MatrixOptions& options = {});

}  // namespace geoentropy
