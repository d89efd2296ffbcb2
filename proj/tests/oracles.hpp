#pragma once

// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond reading graph successor lists and metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geoentropy/paths.hpp"
#include "geoentropy/zoo.hpp"

namespace oracle {

using namespace geoentropy;

inline double arc(long i, long j, long n) {
  long k = std::labs(i - j) % n;
  return static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
}

inline std::vector<std::vector<PointId>> walks(const MoveGraph& g, PointId x) {
  std::vector<std::vector<PointId>> out;
  std::vector<PointId> path{x};
  std::function<void()> rec = [&] {
    if (path.size() == g.steps() + 1) {
      out.push_back(path);
      return;
    }
    for (PointId s : g.successors(path.back())) {
      path.push_back(s);
      rec();
      path.pop_back();
    }
  };
  rec();
  return out;
}

// sup over evader walks from x of min over pursuer walks from y of the
// largest pointwise distance.
inline double delta(const MoveGraph& evader, const MoveGraph& pursuer, PointId x, PointId y) {
  const auto& m = evader.manifold();
  auto chase = walks(pursuer, y);
  double sup = 0.0;
  for (auto& gamma : walks(evader, x)) {
    double inf = std::numeric_limits<double>::infinity();
    for (auto& mu : chase) {
      double worst = 0.0;
      for (std::size_t k = 0; k < gamma.size(); ++k) worst = std::max(worst, m.distance(gamma[k], mu[k]));
      inf = std::min(inf, worst);
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

// Largest subset with all pairwise distances >= eps, by subset enumeration.
inline std::size_t separated(const std::vector<double>& d, std::size_t n, double eps) {
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    auto size = static_cast<std::size_t>(__builtin_popcount(s));
    if (size <= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (s >> i & 1u)
        for (std::size_t j = i + 1; j < n && ok; ++j)
          if (s >> j & 1u && d[i * n + j] < eps) ok = false;
    if (ok) best = size;
  }
  return best;
}

// Shortest-path closure of random edge weights: a random finite metric.
inline std::vector<double> random_metric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = w(rng);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

inline ManifoldSpec circle(std::size_t n) {
  ManifoldSpec s;
  s.kind = "circle";
  s.points = n;
  return s;
}

inline ManifoldSpec torus(std::size_t n, std::size_t dims) {
  ManifoldSpec s;
  s.kind = "torus";
  s.points = n;
  s.dims = dims;
  return s;
}

inline ManifoldSpec mapping_torus(std::size_t n, std::size_t levels) {
  ManifoldSpec s;
  s.kind = "mapping-torus";
  s.points = n;
  s.levels = levels;
  return s;
}

inline StructureSpec zoo(const std::string& name, const ManifoldSpec& m) {
  StructureSpec s;
  s.name = name;
  s.manifold = m;
  s.has_manifold = true;
  return s;
}

inline StructurePtr build(const std::string& name, const ManifoldSpec& m) { return build_structure(zoo(name, m)); }

// Constant-direction field with random integer components in [-2, 2] and a
// random speed per point, on circle(n) or the 2-torus.
inline StructurePtr random_field(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 1), comp(-2, 2), size(4, 6);
  std::uniform_real_distribution<double> speed(0.2, 1.0);
  auto n = static_cast<std::size_t>(size(rng));
  ManifoldPtr m = pick(rng) ? build_circle(n) : build_torus(n - 1, 2);
  VectorField f(m->size());
  for (auto& v : f) {
    v.assign(m->dim(), 0.0);
    for (auto& c : v) c = comp(rng) * speed(rng);
  }
  return from_vector_field(m, f, "random-field");
}

}  // namespace oracle
