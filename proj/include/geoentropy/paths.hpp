#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "geoentropy/structure.hpp"

namespace geoentropy {

/// Where an edge came from: generator index at the source (-1 for the
/// self-loop, -2 for edges composed from component graphs) and the step
/// length in quanta.
struct EdgeProvenance {
  std::int32_t generator = -1;
  std::uint32_t quanta = 0;
};

/// Discrete leaves: connected components of a symmetrized move relation.
struct LeafPartition {
  std::vector<std::uint32_t> leaf_of;
  std::vector<std::vector<PointId>> leaves;  // members sorted by id; leaves ordered by first member

  std::size_t count() const noexcept { return leaves.size(); }
  bool same_leaf(PointId a, PointId b) const { return leaf_of[a] == leaf_of[b]; }
};

struct MoveOptions {
  /// Negative means "use the manifold's mesh scale".
  double snap_tolerance = -1.0;
  /// Quanta per grid cell along the fastest chart axis of a generator.
  std::size_t speed_subdivision = 1;
};

/// One time step (duration 1/T) of the relation "reachable at A-speed <= r".
/// Successor lists are sorted by id and always contain the source itself.
class MoveGraph {
 public:
  MoveGraph() = default;

  const SampledManifold& manifold() const noexcept { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const noexcept { return manifold_; }
  double speed_budget() const noexcept { return r_; }
  std::size_t steps() const noexcept { return steps_; }
  double time_step() const noexcept { return 1.0 / static_cast<double>(steps_); }
  double snap_tolerance() const noexcept { return tolerance_; }
  std::size_t dropped_edges() const noexcept { return dropped_; }
  /// Largest distance between a kept move's chart endpoint and its sample.
  double max_snap_error() const noexcept { return snap_error_; }
  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::span<const PointId> successors(PointId p) const {
    if (clique_) return clique_->leaves[clique_->leaf_of[p]];
    return {targets_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
  }
  std::span<const EdgeProvenance> provenance(PointId p) const {
    return {provenance_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
  }
  bool has_edge(PointId a, PointId b) const;
  std::size_t edge_count() const;
  std::size_t max_out_degree() const;

  /// Pursuer relation with unbounded speed: every step may jump anywhere in
  /// the current leaf.
  bool is_leaf_clique() const noexcept { return clique_ != nullptr; }
  const LeafPartition* clique_leaves() const noexcept { return clique_.get(); }

  static MoveGraph from_lists(ManifoldPtr m, double r, std::size_t steps, double tolerance,
                              std::vector<std::vector<std::pair<PointId, EdgeProvenance>>> lists,
                              std::size_t dropped, double snap_error = 0.0);
  static MoveGraph leaf_cliques(ManifoldPtr m, LeafPartition leaves, std::size_t steps);

 private:
  ManifoldPtr manifold_;
  double r_ = 0.0;
  std::size_t steps_ = 1;
  double tolerance_ = 0.0;
  std::size_t dropped_ = 0;
  double snap_error_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<PointId> targets_;
  std::vector<EdgeProvenance> provenance_;
  std::shared_ptr<const LeafPartition> clique_;
};

/// Moves x -> snap(x + k u v/|v|) for every generator (v, n) and every k >= 1
/// with k u <= r |v| dt / (norm_scale n), where u is one grid cell along the
/// generator's fastest chart axis divided by the speed subdivision. Endpoints
/// farther than the snap tolerance from every sample are dropped. Direct sums
/// use the product of their component relations.
MoveGraph build_move_graph(const GeometricStructure& g, double r, std::size_t steps,
                           const MoveOptions& options = {});

LeafPartition leaf_partition(const MoveGraph& graph);

/// Leaves of g at probe budget r_probe.
LeafPartition leaf_partition(const GeometricStructure& g, double r_probe, std::size_t steps_probe,
                             const MoveOptions& options = {});

using DiscretePath = std::vector<PointId>;

/// Points allowed in a confined search; empty means unconfined.
using PointMask = std::vector<char>;

PointMask make_mask(std::size_t n, std::span<const PointId> members);

inline constexpr std::size_t kEnumerationBudget = 1'000'000;

/// Number of length-T walks from every start inside `allowed`, saturating at
/// UINT64_MAX.
std::vector<std::uint64_t> count_walks_all(const MoveGraph& g, const PointMask& allowed = {});

/// Number of length-T walks from x inside `allowed`, saturating at UINT64_MAX.
std::uint64_t count_walks(const MoveGraph& g, PointId x, const PointMask& allowed = {});

/// Calls `visit` once for every length-T walk from x (inside `allowed`).
/// Throws BudgetExceeded when there are more than `budget` walks.
void enumerate_evader_paths(const MoveGraph& g, PointId x,
                            const std::function<void(std::span<const PointId>)>& visit,
                            const PointMask& allowed = {}, std::size_t budget = kEnumerationBudget);

/// Beam enumeration: keeps the `width` best prefixes per depth under `score`
/// (higher is better; ties by beam_tie_key). Returns the final-depth walks.
std::vector<DiscretePath> beam_evader_paths(
    const MoveGraph& g, PointId x, std::size_t width, std::uint64_t seed,
    const std::function<double(std::span<const PointId>)>& score, const PointMask& allowed = {});

/// Deterministic tie breaker for beam ranking (smaller ranks first).
std::uint64_t beam_tie_key(std::uint64_t seed, std::span<const PointId> path);

}  // namespace geoentropy
