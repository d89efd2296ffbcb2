#include "geoentropy/zoo.hpp"

#include <cmath>
#include <numbers>

#include "geoentropy/error.hpp"

namespace geoentropy {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

ManifoldSpec torus_spec(std::size_t n, std::size_t dims) {
  ManifoldSpec s;
  s.kind = dims == 1 ? "circle" : "torus";
  s.points = n;
  s.dims = dims;
  return s;
}

ManifoldSpec mapping_torus_spec(std::size_t n, std::size_t levels) {
  ManifoldSpec s;
  s.kind = "mapping-torus";
  s.points = n;
  s.levels = levels;
  return s;
}

ManifoldSpec shell_spec() {
  ManifoldSpec s;
  s.kind = "shell";
  s.level = 1;
  s.radii = {1.0, 1.5};
  return s;
}

bool is_flat_torus(const SampledManifold& m) {
  return m.topology() == Topology::torus || m.topology() == Topology::circle;
}

void require(bool ok, std::string_view entry, const std::string& what) {
  if (!ok) throw InvalidArgument(std::string(entry) + " needs " + what);
}

}  // namespace

ManifoldPtr build_manifold(const ManifoldSpec& s) {
  if (s.kind == "torus") return build_torus(s.points, s.dims);
  if (s.kind == "circle") return build_circle(s.points);
  if (s.kind == "interval") return build_interval(s.points);
  if (s.kind == "sphere") return build_sphere(s.level);
  if (s.kind == "shell") return build_shell(s.level, s.radii);
  if (s.kind == "mapping-torus") return build_mapping_torus(s.points, s.levels);
  if (s.kind == "product") {
    if (s.factors.size() != 2) throw InvalidArgument("product manifold needs exactly two factors");
    return product(build_manifold(s.factors[0]), build_manifold(s.factors[1]));
  }
  throw InvalidArgument("unknown manifold kind '" + s.kind + "'");
}

const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = {
      {"zero-field", "expected-zero", "X = 0: only constant paths, d_r = 2d", torus_spec(8, 1), true},
      {"rotation-circle", "expected-zero", "unit-speed rotation of the circle (param speed)",
       torus_spec(8, 1), true},
      {"linear-torus-flow", "expected-zero", "constant field (a, b) on the flat torus (params a, b)",
       torus_spec(8, 2), true},
      {"catmap-suspension", "expected-positive",
       "unit-speed suspension flow of the cat map [[2,1],[1,1]]; h = 2 ln((3+sqrt 5)/2)",
       mapping_torus_spec(16, 4), true},
      {"riemannian-torus", "expected-zero", "flat Riemannian metric, identity anchor", torus_spec(8, 2),
       false},
      {"contact-torus3", "expected-zero",
       "contact distribution spanned by d/dz and sin(2 pi z) d/dx + cos(2 pi z) d/dy", torus_spec(6, 3),
       false},
      {"reeb-like-distribution", "expected-zero",
       "line field (cos 2 pi y, sin 2 pi y) on the 2-torus, rank 1", torus_spec(8, 2), false},
      {"poisson-pi-x", "expected-positive",
       "Pi_X = X ^ d/dq on N x circle for an inner vector field X (param q_points); h = 2 h_top(X), "
       "zero when X has zero entropy",
       torus_spec(8, 2), false},
      {"poisson-sphere-shell", "expected-zero",
       "|x|^2 (x1 d2^d3 + x2 d3^d1 + x3 d1^d2) on concentric spheres; leaves are the spheres",
       shell_spec(), false},
  };
  return entries;
}

const ZooEntry& zoo_entry(std::string_view name) {
  for (auto& e : zoo_entries())
    if (e.name == name) return e;
  throw InvalidArgument("unknown zoo structure '" + std::string(name) + "'");
}

VectorField zoo_vector_field(std::string_view name, const SampledManifold& m,
                             const std::map<std::string, double>& params) {
  const auto& entry = zoo_entry(name);
  if (!entry.vector_field) throw InvalidArgument(std::string(name) + " is not a vector-field structure");
  VectorField field(m.size(), Coords(m.dim(), 0.0));
  if (name == "zero-field") return field;
  if (name == "rotation-circle") {
    require(m.topology() == Topology::circle || (m.topology() == Topology::torus && m.dim() == 1), name,
            "a circle");
    double w = param(params, "speed", 1.0);
    for (auto& v : field) v[0] = w;
    return field;
  }
  if (name == "linear-torus-flow") {
    require(is_flat_torus(m) && m.dim() >= 2, name, "a torus of dimension at least 2");
    double a = param(params, "a", 1.0), b = param(params, "b", 1.0);
    for (auto& v : field) {
      v[0] = a;
      v[1] = b;
    }
    return field;
  }
  // catmap-suspension
  require(m.topology() == Topology::mapping_torus, name, "a mapping-torus manifold");
  double w = param(params, "speed", 1.0);
  for (auto& v : field) v[2] = w;
  return field;
}

double known_flow_entropy(std::string_view name) {
  if (name == "catmap-suspension") return std::log((3.0 + std::sqrt(5.0)) / 2.0);
  return 0.0;
}

ManifoldPtr spec_manifold(const StructureSpec& spec) {
  if (spec.has_manifold) return build_manifold(spec.manifold);
  return build_manifold(zoo_entry(spec.name).default_manifold);
}

StructurePtr poisson_pi_x(ManifoldPtr n, const VectorField& x, std::size_t q_points, std::string name) {
  if (!n) throw InvalidArgument("null manifold");
  if (x.size() != n->size()) throw InvalidArgument("inner field must be defined at every point");
  auto m = product(n, build_circle(q_points));
  std::size_t dn = n->dim(), dim = dn + 1;
  std::size_t q = dn;
  const auto& circle = m->second_factor();
  std::vector<std::vector<double>> bivector(m->size(), std::vector<double>(dim * dim, 0.0));
  for (PointId a = 0; a < n->size(); ++a)
    for (PointId b = 0; b < circle->size(); ++b) {
      auto& pi = bivector[product_id(*circle, a, b)];
      for (std::size_t i = 0; i < dn; ++i) {
        pi[i * dim + q] = x[a][i];
        pi[q * dim + i] = -x[a][i];
      }
    }
  // Unit sphere of the max norm of |.|_N and |.|_q: +-dx_i, +-dq and the corners.
  std::vector<Covector> frame;
  auto unit = [&](std::size_t i) {
    Coords c(dim, 0.0);
    c[i] = 1.0;
    return c;
  };
  for (std::size_t i = 0; i < dim; ++i) frame.push_back({unit(i), 1.0});
  for (std::size_t i = 0; i < dn; ++i)
    for (double s : {1.0, -1.0}) {
      Coords c = unit(i);
      c[q] = s;
      frame.push_back({c, 1.0});
    }
  std::vector<std::vector<Covector>> frames(m->size(), frame);
  return from_poisson(std::move(m), bivector, frames, std::move(name));
}

StructurePtr poisson_sphere_shell(ManifoldPtr shell, std::string name) {
  if (!shell || shell->dim() != 3) throw InvalidArgument("sphere-shell bivector needs a 3-dimensional sample");
  std::vector<std::vector<double>> bivector(shell->size(), std::vector<double>(9, 0.0));
  for (PointId p = 0; p < shell->size(); ++p) {
    auto x = shell->coords(p);
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    auto& pi = bivector[p];
    auto set = [&](std::size_t i, std::size_t j, double v) {
      pi[i * 3 + j] = v;
      pi[j * 3 + i] = -v;
    };
    set(1, 2, r2 * x[0]);
    set(2, 0, r2 * x[1]);
    set(0, 1, r2 * x[2]);
  }
  return from_poisson(shell, bivector, euclidean_cotangent_frame(*shell), std::move(name));
}

StructurePtr build_structure(const StructureSpec& spec) {
  switch (spec.kind) {
    case StructureSpec::Kind::scale:
      if (spec.children.size() != 1) throw InvalidArgument("scale needs exactly one structure");
      return scale_norm(build_structure(spec.children[0]), spec.gamma);
    case StructureSpec::Kind::direct_sum:
      if (spec.children.size() != 2) throw InvalidArgument("direct sum needs exactly two structures");
      return direct_sum(build_structure(spec.children[0]), build_structure(spec.children[1]));
    case StructureSpec::Kind::zoo:
      break;
  }
  const auto& entry = zoo_entry(spec.name);
  if (entry.vector_field) {
    auto m = spec_manifold(spec);
    return from_vector_field(m, zoo_vector_field(spec.name, *m, spec.params), spec.name);
  }
  if (spec.name == "poisson-pi-x") {
    if (spec.children.size() != 1 || spec.children[0].kind != StructureSpec::Kind::zoo ||
        !zoo_entry(spec.children[0].name).vector_field)
      throw InvalidArgument("poisson-pi-x needs one inner vector-field structure");
    const auto& inner = spec.children[0];
    auto n = spec_manifold(inner);
    auto q = static_cast<std::size_t>(param(spec.params, "q_points", 8.0));
    return poisson_pi_x(n, zoo_vector_field(inner.name, *n, inner.params), q, spec.name);
  }
  auto m = spec_manifold(spec);
  if (spec.name == "riemannian-torus") {
    require(is_flat_torus(*m) || m->topology() == Topology::interval, spec.name, "a flat torus or interval");
    return from_riemannian(m, spec.name);
  }
  if (spec.name == "contact-torus3") {
    require(m->topology() == Topology::torus && m->dim() == 3, spec.name, "a 3-torus");
    VectorField e1(m->size(), Coords(3, 0.0)), e2(m->size(), Coords(3, 0.0));
    for (PointId p = 0; p < m->size(); ++p) {
      double z = m->coords(p)[2];
      e1[p][2] = 1.0;
      e2[p][0] = std::sin(2.0 * std::numbers::pi * z);
      e2[p][1] = std::cos(2.0 * std::numbers::pi * z);
      for (double& c : e2[p])
        if (std::fabs(c) < 1e-15) c = 0.0;
    }
    return from_distribution(m, {e1, e2}, spec.name);
  }
  if (spec.name == "reeb-like-distribution") {
    require(m->topology() == Topology::torus && m->dim() == 2, spec.name, "a 2-torus");
    VectorField e(m->size(), Coords(2, 0.0));
    for (PointId p = 0; p < m->size(); ++p) {
      double y = m->coords(p)[1];
      e[p][0] = std::cos(2.0 * std::numbers::pi * y);
      e[p][1] = std::sin(2.0 * std::numbers::pi * y);
      for (double& c : e[p])
        if (std::fabs(c) < 1e-15) c = 0.0;
    }
    return from_distribution(m, {e}, spec.name);
  }
  if (spec.name == "poisson-sphere-shell") {
    require(m->topology() == Topology::shell, spec.name, "a shell manifold");
    return poisson_sphere_shell(m, spec.name);
  }
  throw InvalidArgument("zoo entry '" + spec.name + "' has no builder");
}

}  // namespace geoentropy
