#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geoentropy {

using PointId = std::uint32_t;
using Coords = std::vector<double>;

/// Hard cap on sample sizes; the base metric is a dense n x n matrix.
inline constexpr std::size_t kPointBudget = 10000;

/// Constructors check the triangle inequality over every triple up to this size
/// and over a deterministic sample of triples beyond it.
inline constexpr std::size_t kExhaustiveMetricCheck = 600;

enum class Topology { torus, circle, sphere2, interval, product, mapping_torus, shell };

std::string_view to_string(Topology t);

/// Coordinate chart of a sampled manifold. Coordinates handed to `distance`
/// and `candidates` are canonical (already wrapped into the chart domain).
class Chart {
 public:
  virtual ~Chart() = default;

  virtual std::size_t dim() const = 0;
  virtual Coords canonical(std::span<const double> c) const = 0;
  virtual double distance(std::span<const double> a, std::span<const double> b) const = 0;

  /// Grid spacing per chart axis. Empty for unstructured samples, which use
  /// `spacing()` in every direction.
  virtual std::vector<double> axis_spacing() const { return {}; }
  virtual double spacing() const = 0;

  /// Sample ids that can be nearest to `c`. Empty means "scan everything".
  virtual std::vector<PointId> candidates(std::span<const double> /*c*/) const { return {}; }
};

/// Finite metric sample of a compact manifold. Immutable after construction.
class SampledManifold {
 public:
  SampledManifold(Topology tag, std::string name, std::size_t dim, std::vector<double> coords,
                  std::vector<double> metric, std::shared_ptr<const Chart> chart);

  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return dim_; }
  Topology topology() const noexcept { return tag_; }
  const std::string& name() const noexcept { return name_; }

  std::span<const double> coords(PointId id) const {
    return {coords_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  double distance(PointId a, PointId b) const noexcept {
    return metric_[static_cast<std::size_t>(a) * size_ + b];
  }
  std::span<const double> row(PointId a) const {
    return {metric_.data() + static_cast<std::size_t>(a) * size_, size_};
  }
  const std::vector<double>& metric() const noexcept { return metric_; }

  /// Minimum off-diagonal base distance.
  double mesh_scale() const noexcept { return mesh_scale_; }
  double diameter() const noexcept { return diameter_; }
  const Chart& chart() const noexcept { return *chart_; }
  std::shared_ptr<const Chart> chart_ptr() const noexcept { return chart_; }

  /// Nearest sample to `c` (ties -> smallest id) and its chart distance.
  std::pair<PointId, double> snap_with_distance(std::span<const double> c) const;
  PointId snap(std::span<const double> c) const { return snap_with_distance(c).first; }

  /// Factors of a product manifold, null otherwise.
  const std::shared_ptr<const SampledManifold>& first_factor() const noexcept { return first_; }
  const std::shared_ptr<const SampledManifold>& second_factor() const noexcept { return second_; }

 private:
  friend std::shared_ptr<const SampledManifold> product(std::shared_ptr<const SampledManifold>,
                                                        std::shared_ptr<const SampledManifold>,
                                                        std::size_t);

  Topology tag_;
  std::string name_;
  std::size_t dim_;
  std::size_t size_;
  std::vector<double> coords_;
  std::vector<double> metric_;
  std::shared_ptr<const Chart> chart_;
  double mesh_scale_ = 0.0;
  double diameter_ = 0.0;
  std::shared_ptr<const SampledManifold> first_, second_;
};

using ManifoldPtr = std::shared_ptr<const SampledManifold>;

/// Uniform grid on the flat torus of circumference 1 per axis, dims in {1,2,3}.
ManifoldPtr build_torus(std::size_t points_per_dim, std::size_t dims);

/// torus(n, 1) tagged as a circle.
ManifoldPtr build_circle(std::size_t points);

/// `points` equally spaced samples of [0, 1] with |x - y|.
ManifoldPtr build_interval(std::size_t points);

/// Icosahedral geodesic mesh of the unit sphere with great-circle distance.
ManifoldPtr build_sphere(std::size_t subdivision_level);

/// Concentric copies of the sphere mesh at the given radii, Euclidean distance
/// of the ambient 3-space.
ManifoldPtr build_shell(std::size_t subdivision_level, std::vector<double> radii);

/// Mapping torus of a symmetric hyperbolic automorphism of the 2-torus,
/// (p, s + 1) ~ (A p, s). Chart (x, y, s) in [0,1)^3. Grid n x n x levels; the
/// base metric is the shortest-path metric of the grid with local lengths
/// |A^s v| (a Sol-type metric invariant under the gluing). Fiber edges join
/// lattice points differing by a primitive step of sup-norm <= radius.
ManifoldPtr build_mapping_torus(std::size_t points_per_dim, std::size_t levels,
                                std::array<int, 4> monodromy = {2, 1, 1, 1},
                                std::size_t radius = 3);

/// Cartesian product with the max metric. Ids are a * |m2| + b.
ManifoldPtr product(ManifoldPtr m1, ManifoldPtr m2, std::size_t budget = kPointBudget);

/// Id of the product point (a, b).
inline PointId product_id(const SampledManifold& m2, PointId a, PointId b) {
  return static_cast<PointId>(static_cast<std::size_t>(a) * m2.size() + b);
}

struct MetricReport {
  bool symmetric = true;
  bool positive = true;
  bool triangle = true;
  std::size_t triples_checked = 0;
  double worst_triangle_excess = 0.0;

  bool ok() const noexcept { return symmetric && positive && triangle; }
};

/// Checks symmetry, off-diagonal positivity and the triangle inequality of a
/// dense n x n matrix. Triangle excess up to 1e-12 * (d_ij + d_jk) counts as
/// rounding. `sample` > 0 checks that many pseudo-random triples instead of all.
MetricReport check_metric(std::span<const double> matrix, std::size_t n, std::size_t sample = 0);

}  // namespace geoentropy
