#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geoentropy/structure.hpp"

namespace geoentropy {

/// Declarative manifold: kind is one of torus, circle, interval, sphere,
/// shell, mapping-torus, product.
struct ManifoldSpec {
  std::string kind = "circle";
  std::size_t points = 8;  // per dimension (torus, circle, interval, mapping-torus)
  std::size_t dims = 1;    // torus
  std::size_t level = 1;   // sphere, shell
  std::size_t levels = 4;  // mapping-torus
  std::vector<double> radii{1.0, 1.5};  // shell
  std::vector<ManifoldSpec> factors;    // product
};

ManifoldPtr build_manifold(const ManifoldSpec& spec);

/// Declarative structure: a zoo entry on a manifold, a norm scaling of a
/// child, or a direct sum of two children. poisson-pi-x takes its inner
/// vector field as the single child.
struct StructureSpec {
  enum class Kind { zoo, scale, direct_sum };

  Kind kind = Kind::zoo;
  std::string name;
  ManifoldSpec manifold;
  bool has_manifold = false;  // false: the entry's default manifold
  std::map<std::string, double> params;
  double gamma = 1.0;
  std::vector<StructureSpec> children;
};

StructurePtr build_structure(const StructureSpec& spec);

struct ZooEntry {
  std::string name;
  std::string expected;  // expected-zero or expected-positive
  std::string summary;
  ManifoldSpec default_manifold;
  bool vector_field = false;  // usable as an inner field / Bowen-Dinaburg input
};

const std::vector<ZooEntry>& zoo_entries();
const ZooEntry& zoo_entry(std::string_view name);

/// The generating field of a vector-field zoo entry on m.
VectorField zoo_vector_field(std::string_view name, const SampledManifold& m,
                             const std::map<std::string, double>& params = {});

/// Manifold a zoo spec lives on (its own or the entry's default).
ManifoldPtr spec_manifold(const StructureSpec& spec);

/// Entropy of the flow for vector-field entries where it is known in closed
/// form: ln of the cat-map eigenvalue for catmap-suspension, 0 otherwise.
double known_flow_entropy(std::string_view name);

/// Pi_X = X ^ d/dq on N x circle(q_points), max norm on the cotangent frame.
StructurePtr poisson_pi_x(ManifoldPtr n, const VectorField& x, std::size_t q_points,
                          std::string name = "poisson-pi-x");

/// |x|^2 (x1 d2^d3 + x2 d3^d1 + x3 d1^d2) with the chart cotangent frame.
StructurePtr poisson_sphere_shell(ManifoldPtr shell, std::string name = "poisson-sphere-shell");

}  // namespace geoentropy
