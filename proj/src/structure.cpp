#include "geoentropy/structure.hpp"

#include <algorithm>
#include <cmath>

#include "geoentropy/error.hpp"

namespace geoentropy {

std::string_view to_string(Descriptor d) {
  switch (d) {
    case Descriptor::vector_field: return "vector-field";
    case Descriptor::riemannian: return "riemannian";
    case Descriptor::distribution: return "distribution";
    case Descriptor::poisson: return "poisson";
    case Descriptor::direct_sum: return "direct-sum";
    case Descriptor::scaled: return "scaled";
  }
  return "unknown";
}

namespace {

bool is_zero(const Coords& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double norm2(const Coords& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Coords negate(const Coords& v) {
  Coords out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] == 0.0 ? 0.0 : -v[i];
  return out;
}

// Appends (v, n) and (-v, n); the zero vector is stored once.
void push_symmetric(std::vector<Generator>& out, const Coords& v, double n) {
  out.push_back({v, n});
  if (!is_zero(v)) out.push_back({negate(v), n});
}

std::size_t rank_of(std::vector<Coords> rows, std::size_t dim) {
  double scale = 0.0;
  for (auto& r : rows)
    for (double x : r) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) return 0;
  double tol = 1e-10 * scale;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < dim && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    for (std::size_t i = rank; i < rows.size(); ++i)
      if (std::fabs(rows[i][col]) > std::fabs(rows[piv][col])) piv = i;
    if (std::fabs(rows[piv][col]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank) continue;
      double f = rows[i][col] / rows[rank][col];
      for (std::size_t c = col; c < dim; ++c) rows[i][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

void require_field(const SampledManifold& m, const VectorField& f, const char* what) {
  if (f.size() != m.size())
    throw InvalidArgument(std::string(what) + ": field must be defined at every point (" +
                          std::to_string(f.size()) + " of " + std::to_string(m.size()) + ")");
  for (auto& v : f)
    if (v.size() != m.dim()) throw InvalidArgument(std::string(what) + ": vector of wrong dimension");
}

}  // namespace

GeometricStructure::GeometricStructure(ManifoldPtr manifold, GeneratorTable generators,
                                       Descriptor descriptor, std::string name)
    : manifold_(std::move(manifold)),
      generators_(std::make_shared<const GeneratorTable>(std::move(generators))),
      descriptor_(descriptor),
      name_(std::move(name)) {
  if (!manifold_) throw InvalidArgument("structure over a null manifold");
  if (generators_->size() != manifold_->size())
    throw InvalidArgument("every point needs a generator list");
  for (auto& list : *generators_) {
    if (list.empty()) throw InvalidArgument("empty generator list");
    for (auto& g : list) {
      if (g.velocity.size() != manifold_->dim()) throw InvalidArgument("generator of wrong dimension");
      if (!(g.fiber_norm >= 0.0) || !std::isfinite(g.fiber_norm))
        throw InvalidArgument("fiber norms must be finite and nonnegative");
      if (g.fiber_norm == 0.0 && !is_zero(g.velocity))
        throw InvalidArgument("a nonzero anchor image needs a positive fiber norm");
    }
  }
}

std::vector<Generator> GeometricStructure::admissible(PointId p, double r) const {
  std::vector<Generator> out;
  for (auto& g : generators(p))
    if (is_zero(g.velocity) || norm_scale_ * g.fiber_norm <= r) out.push_back(g);
  return out;
}

std::size_t GeometricStructure::anchor_rank(PointId p) const {
  std::vector<Coords> rows;
  for (auto& g : generators(p)) rows.push_back(g.velocity);
  return rank_of(std::move(rows), manifold_->dim());
}

bool GeometricStructure::anchor_surjective() const {
  for (PointId p = 0; p < manifold_->size(); ++p)
    if (anchor_rank(p) < manifold_->dim()) return false;
  return true;
}

bool GeometricStructure::generators_symmetric() const {
  for (PointId p = 0; p < manifold_->size(); ++p) {
    auto gens = generators(p);
    for (auto& g : gens) {
      Coords neg = negate(g.velocity);
      bool found = std::any_of(gens.begin(), gens.end(), [&](const Generator& h) {
        return h.fiber_norm == g.fiber_norm && h.velocity == neg;
      });
      if (!found) return false;
    }
  }
  return true;
}

StructurePtr from_vector_field(ManifoldPtr m, const VectorField& field, std::string name) {
  if (!m) throw InvalidArgument("null manifold");
  require_field(*m, field, "from_vector_field");
  GeneratorTable gens(m->size());
  for (PointId p = 0; p < m->size(); ++p) {
    push_symmetric(gens[p], field[p], 1.0);
    gens[p].push_back({Coords(m->dim(), 0.0), 0.0});
  }
  return std::make_shared<GeometricStructure>(std::move(m), std::move(gens),
                                              Descriptor::vector_field, std::move(name));
}

StructurePtr from_riemannian(ManifoldPtr m, const std::vector<std::vector<Coords>>& frame,
                             std::string name) {
  if (!m) throw InvalidArgument("null manifold");
  if (frame.size() != m->size()) throw InvalidArgument("frame must be given at every point");
  std::size_t dim = m->dim();
  GeneratorTable gens(m->size());
  for (PointId p = 0; p < m->size(); ++p) {
    auto& f = frame[p];
    if (f.size() != dim || rank_of(f, dim) < dim)
      throw InvalidArgument("degenerate frame at point " + std::to_string(p));
    for (auto& e : f) {
      double n = norm2(e);
      Coords u(dim);
      for (std::size_t i = 0; i < dim; ++i) u[i] = e[i] / n;
      push_symmetric(gens[p], u, 1.0);
    }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j)
        for (double sign : {1.0, -1.0}) {
          Coords v(dim);
          double ni = norm2(f[i]), nj = norm2(f[j]);
          for (std::size_t c = 0; c < dim; ++c) v[c] = f[i][c] / ni + sign * f[j][c] / nj;
          double n = norm2(v);
          for (double& x : v) x /= n;
          push_symmetric(gens[p], v, 1.0);
        }
    gens[p].push_back({Coords(dim, 0.0), 0.0});
  }
  return std::make_shared<GeometricStructure>(std::move(m), std::move(gens),
                                              Descriptor::riemannian, std::move(name));
}

StructurePtr from_riemannian(ManifoldPtr m, std::string name) {
  if (!m) throw InvalidArgument("null manifold");
  std::vector<Coords> basis(m->dim(), Coords(m->dim(), 0.0));
  for (std::size_t i = 0; i < m->dim(); ++i) basis[i][i] = 1.0;
  std::vector<std::vector<Coords>> frame(m->size(), basis);
  return from_riemannian(std::move(m), frame, std::move(name));
}

StructurePtr from_distribution(ManifoldPtr m, const std::vector<VectorField>& frame_fields,
                               std::string name) {
  if (!m) throw InvalidArgument("null manifold");
  if (frame_fields.empty()) throw InvalidArgument("distribution needs at least one frame field");
  for (auto& f : frame_fields) require_field(*m, f, "from_distribution");
  GeneratorTable gens(m->size());
  for (PointId p = 0; p < m->size(); ++p) {
    for (auto& f : frame_fields) {
      double n = norm2(f[p]);
      if (n > 0.0) push_symmetric(gens[p], f[p], n);
    }
    gens[p].push_back({Coords(m->dim(), 0.0), 0.0});
  }
  return std::make_shared<GeometricStructure>(std::move(m), std::move(gens),
                                              Descriptor::distribution, std::move(name));
}

std::vector<std::vector<Covector>> euclidean_cotangent_frame(const SampledManifold& m) {
  std::vector<Covector> basis;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Covector c{Coords(m.dim(), 0.0), 1.0};
    c.components[i] = 1.0;
    basis.push_back(c);
  }
  return std::vector<std::vector<Covector>>(m.size(), basis);
}

StructurePtr from_poisson(ManifoldPtr m, const std::vector<std::vector<double>>& bivector,
                          const std::vector<std::vector<Covector>>& cotangent_frame,
                          std::string name) {
  if (!m) throw InvalidArgument("null manifold");
  std::size_t dim = m->dim();
  if (bivector.size() != m->size() || cotangent_frame.size() != m->size())
    throw InvalidArgument("bivector and cotangent frame must be given at every point");
  GeneratorTable gens(m->size());
  for (PointId p = 0; p < m->size(); ++p) {
    auto& pi = bivector[p];
    if (pi.size() != dim * dim) throw InvalidArgument("bivector of wrong shape");
    double scale = 0.0;
    for (double x : pi) scale = std::max(scale, std::fabs(x));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if (std::fabs(pi[i * dim + j] + pi[j * dim + i]) > 1e-12 * std::max(scale, 1.0))
          throw InvalidArgument("bivector is not antisymmetric at point " + std::to_string(p));
    for (auto& xi : cotangent_frame[p]) {
      if (xi.components.size() != dim || !(xi.norm > 0.0))
        throw InvalidArgument("cotangent frame entries need dimension " + std::to_string(dim) +
                              " and a positive norm");
      Coords v(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) v[j] += xi.components[i] * pi[i * dim + j];
      for (double& x : v)
        if (x == 0.0) x = 0.0;  // drop negative zeros
      if (is_zero(v)) continue;
      push_symmetric(gens[p], v, xi.norm);
    }
    gens[p].push_back({Coords(dim, 0.0), 0.0});
  }
  return std::make_shared<GeometricStructure>(std::move(m), std::move(gens), Descriptor::poisson,
                                              std::move(name));
}

StructurePtr scale_norm(StructurePtr g, double gamma) {
  if (!g) throw InvalidArgument("null structure");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
  auto out = std::make_shared<GeometricStructure>(*g);
  out->norm_scale_ = g->norm_scale_ * gamma;
  out->descriptor_ = Descriptor::scaled;
  out->name_ = g->name_ + "*" + std::to_string(gamma);
  return out;
}

StructurePtr direct_sum(StructurePtr g1, StructurePtr g2, std::size_t budget) {
  if (!g1 || !g2) throw InvalidArgument("null structure");
  auto m = product(g1->manifold_ptr(), g2->manifold_ptr(), budget);
  const auto& m2 = g2->manifold();
  std::size_t d1 = g1->manifold().dim(), d2 = m2.dim();
  auto with_idle = [](const GeometricStructure& g, PointId p, std::size_t dim) {
    std::vector<Generator> list;
    for (auto& gen : g.generators(p)) list.push_back({gen.velocity, gen.fiber_norm * g.norm_scale()});
    if (std::none_of(list.begin(), list.end(), [](const Generator& x) { return is_zero(x.velocity); }))
      list.push_back({Coords(dim, 0.0), 0.0});
    return list;
  };
  GeneratorTable gens(m->size());
  for (PointId a = 0; a < g1->manifold().size(); ++a) {
    auto l1 = with_idle(*g1, a, d1);
    for (PointId b = 0; b < m2.size(); ++b) {
      auto l2 = with_idle(*g2, b, d2);
      auto& out = gens[product_id(m2, a, b)];
      for (auto& x : l1)
        for (auto& y : l2) {
          Generator s;
          s.velocity = x.velocity;
          s.velocity.insert(s.velocity.end(), y.velocity.begin(), y.velocity.end());
          s.fiber_norm = is_zero(s.velocity) ? 0.0 : std::max(x.fiber_norm, y.fiber_norm);
          bool dup = std::any_of(out.begin(), out.end(), [&](const Generator& e) {
            return e.fiber_norm == s.fiber_norm && e.velocity == s.velocity;
          });
          if (!dup) out.push_back(std::move(s));
        }
    }
  }
  auto out = std::make_shared<GeometricStructure>(std::move(m), std::move(gens),
                                                  Descriptor::direct_sum,
                                                  g1->name() + "+" + g2->name());
  out->first_ = std::move(g1);
  out->second_ = std::move(g2);
  return out;
}

}  // namespace geoentropy
