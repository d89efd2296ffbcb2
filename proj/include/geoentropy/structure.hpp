#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoentropy/manifold.hpp"

namespace geoentropy {

/// One sampled fiber element a: its anchor image and its norm, (#a, |a|).
struct Generator {
  Coords velocity;
  double fiber_norm = 0.0;
};

enum class Descriptor { vector_field, riemannian, distribution, poisson, direct_sum, scaled };

std::string_view to_string(Descriptor d);

using GeneratorTable = std::vector<std::vector<Generator>>;

/// Discrete geometric structure (M, A, |.|, #): per sample point a finite
/// symmetric sample of the fiber unit sphere pushed through the anchor.
/// Immutable; scaled copies share the generator table.
class GeometricStructure {
 public:
  GeometricStructure(ManifoldPtr manifold, GeneratorTable generators, Descriptor descriptor,
                     std::string name);

  const SampledManifold& manifold() const noexcept { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const noexcept { return manifold_; }
  std::span<const Generator> generators(PointId p) const { return (*generators_)[p]; }
  double norm_scale() const noexcept { return norm_scale_; }
  Descriptor descriptor() const noexcept { return descriptor_; }
  const std::string& name() const noexcept { return name_; }

  /// Components of a direct sum (possibly below a scale), null otherwise.
  const std::shared_ptr<const GeometricStructure>& first() const noexcept { return first_; }
  const std::shared_ptr<const GeometricStructure>& second() const noexcept { return second_; }
  bool is_direct_sum() const noexcept { return first_ != nullptr; }

  /// Generators with norm_scale * fiber_norm <= r. Zero-velocity entries are
  /// always admissible.
  std::vector<Generator> admissible(PointId p, double r) const;

  /// Dimension of the span of the anchor image at p.
  std::size_t anchor_rank(PointId p) const;
  bool anchor_surjective() const;

  /// For each (v, n) the entry (-v, n) is present at every point.
  bool generators_symmetric() const;

 private:
  friend std::shared_ptr<const GeometricStructure> scale_norm(
      std::shared_ptr<const GeometricStructure>, double);
  friend std::shared_ptr<const GeometricStructure> direct_sum(
      std::shared_ptr<const GeometricStructure>, std::shared_ptr<const GeometricStructure>,
      std::size_t);

  ManifoldPtr manifold_;
  std::shared_ptr<const GeneratorTable> generators_;
  double norm_scale_ = 1.0;
  Descriptor descriptor_;
  std::string name_;
  std::shared_ptr<const GeometricStructure> first_, second_;
};

using StructurePtr = std::shared_ptr<const GeometricStructure>;

/// Tangent vector per point id, chart coordinates.
using VectorField = std::vector<Coords>;

/// Rank-1 trivial bundle whose unit section maps to X.
StructurePtr from_vector_field(ManifoldPtr m, const VectorField& field, std::string name = "vector-field");

/// A = TM with identity anchor; `frame[p]` is an orthonormal frame at p.
/// Samples +-e_i and (+-e_i +- e_j)/sqrt(2).
StructurePtr from_riemannian(ManifoldPtr m, const std::vector<std::vector<Coords>>& frame,
                             std::string name = "riemannian");

/// Riemannian structure whose frame is the chart basis at every point.
StructurePtr from_riemannian(ManifoldPtr m, std::string name = "riemannian");

/// A = D with inclusion anchor, spanned by the given fields; the rank may drop.
StructurePtr from_distribution(ManifoldPtr m, const std::vector<VectorField>& frame_fields,
                               std::string name = "distribution");

struct Covector {
  Coords components;
  double norm = 1.0;
};

/// A = T*M with #(xi)^j = sum_i xi_i Pi^{ij}. `bivector[p]` is a row-major
/// dim x dim antisymmetric matrix.
StructurePtr from_poisson(ManifoldPtr m, const std::vector<std::vector<double>>& bivector,
                          const std::vector<std::vector<Covector>>& cotangent_frame,
                          std::string name = "poisson");

/// Chart covector basis +-dx_i with unit norms at every point.
std::vector<std::vector<Covector>> euclidean_cotangent_frame(const SampledManifold& m);

/// Multiplies every fiber norm by gamma > 0.
StructurePtr scale_norm(StructurePtr g, double gamma);

/// (M1 x M2, A1 + A2, max norm, #1 + #2) over the max-metric product.
StructurePtr direct_sum(StructurePtr g1, StructurePtr g2, std::size_t budget = kPointBudget);

}  // namespace geoentropy
