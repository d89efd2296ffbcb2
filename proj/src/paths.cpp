#include "geoentropy/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geoentropy/error.hpp"

namespace geoentropy {

namespace {

constexpr std::size_t kMaxQuanta = 100000;

using EdgeList = std::vector<std::vector<std::pair<PointId, EdgeProvenance>>>;

void add_edge(std::vector<std::pair<PointId, EdgeProvenance>>& list, PointId to, EdgeProvenance prov) {
  for (auto& e : list)
    if (e.first == to) return;
  list.emplace_back(to, prov);
}

double step_quantum(const Chart& chart, std::span<const double> unit, std::size_t subdivision) {
  auto spacing = chart.axis_spacing();
  double u = std::numeric_limits<double>::infinity();
  if (spacing.empty()) {
    u = chart.spacing();
  } else {
    for (std::size_t i = 0; i < unit.size(); ++i)
      if (unit[i] != 0.0) u = std::min(u, spacing[i] / std::fabs(unit[i]));
  }
  return u / static_cast<double>(subdivision);
}

MoveGraph build_plain(const GeometricStructure& g, double r, std::size_t steps,
                      const MoveOptions& options) {
  const auto& m = g.manifold();
  double tol = options.snap_tolerance < 0.0 ? m.mesh_scale() : options.snap_tolerance;
  double dt = 1.0 / static_cast<double>(steps);
  EdgeList lists(m.size());
  std::size_t dropped = 0;
  double worst = 0.0;
  std::size_t dim = m.dim();
  Coords unit(dim), end(dim);
  for (PointId p = 0; p < m.size(); ++p) {
    auto& list = lists[p];
    list.emplace_back(p, EdgeProvenance{-1, 0});
    auto x = m.coords(p);
    auto gens = g.generators(p);
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      const auto& gen = gens[gi];
      double len = 0.0;
      for (double c : gen.velocity) len += c * c;
      len = std::sqrt(len);
      if (len == 0.0) continue;
      for (std::size_t i = 0; i < dim; ++i) unit[i] = gen.velocity[i] / len;
      double u = step_quantum(m.chart(), unit, options.speed_subdivision);
      double reach = r / (g.norm_scale() * gen.fiber_norm) * len * dt;
      double quanta = std::floor(reach / u + 1e-9);
      if (quanta > static_cast<double>(kMaxQuanta))
        throw BudgetExceeded("speed budget " + std::to_string(r) +
                             " needs more than 1e5 steps per move on this mesh");
      auto kmax = static_cast<std::uint32_t>(quanta);
      for (std::uint32_t k = 1; k <= kmax; ++k) {
        double len_k = static_cast<double>(k) * u;
        for (std::size_t i = 0; i < dim; ++i) end[i] = x[i] + len_k * unit[i];
        auto [to, dist] = m.snap_with_distance(end);
        if (dist > tol + 1e-12) {
          ++dropped;
          continue;
        }
        worst = std::max(worst, dist);
        add_edge(list, to, EdgeProvenance{static_cast<std::int32_t>(gi), k});
      }
    }
  }
  return MoveGraph::from_lists(g.manifold_ptr(), r, steps, tol, std::move(lists), dropped, worst);
}

MoveGraph build_any(const GeometricStructure& g, double r, std::size_t steps, const MoveOptions& options) {
  if (!g.is_direct_sum()) return build_plain(g, r, steps, options);
  // Max norm: an element of A1 + A2 is admissible iff both components are.
  double budget = r / g.norm_scale();
  MoveGraph a = build_any(*g.first(), budget, steps, options);
  MoveGraph b = build_any(*g.second(), budget, steps, options);
  const auto& m2 = g.second()->manifold();
  EdgeList lists(g.manifold().size());
  for (PointId p = 0; p < a.size(); ++p)
    for (PointId q = 0; q < b.size(); ++q) {
      auto& list = lists[product_id(m2, p, q)];
      for (PointId s : a.successors(p))
        for (PointId t : b.successors(q)) {
          PointId to = product_id(m2, s, t);
          list.emplace_back(to, to == product_id(m2, p, q) ? EdgeProvenance{-1, 0}
                                                            : EdgeProvenance{-2, 0});
        }
    }
  double tol = std::max(a.snap_tolerance(), b.snap_tolerance());
  return MoveGraph::from_lists(g.manifold_ptr(), r, steps, tol, std::move(lists),
                               a.dropped_edges() * b.size() + b.dropped_edges() * a.size(),
                               std::max(a.max_snap_error(), b.max_snap_error()));
}

}  // namespace

MoveGraph MoveGraph::from_lists(ManifoldPtr m, double r, std::size_t steps, double tolerance,
                                EdgeList lists, std::size_t dropped, double snap_error) {
  MoveGraph out;
  out.manifold_ = std::move(m);
  out.r_ = r;
  out.steps_ = steps;
  out.tolerance_ = tolerance;
  out.dropped_ = dropped;
  out.snap_error_ = snap_error;
  out.offsets_.assign(lists.size() + 1, 0);
  for (std::size_t p = 0; p < lists.size(); ++p) {
    auto& l = lists[p];
    std::stable_sort(l.begin(), l.end(), [](auto& a, auto& b) { return a.first < b.first; });
    out.offsets_[p + 1] = out.offsets_[p] + l.size();
  }
  out.targets_.reserve(out.offsets_.back());
  out.provenance_.reserve(out.offsets_.back());
  for (auto& l : lists)
    for (auto& [to, prov] : l) {
      out.targets_.push_back(to);
      out.provenance_.push_back(prov);
    }
  return out;
}

MoveGraph MoveGraph::leaf_cliques(ManifoldPtr m, LeafPartition leaves, std::size_t steps) {
  MoveGraph out;
  out.manifold_ = std::move(m);
  out.r_ = std::numeric_limits<double>::infinity();
  out.steps_ = steps;
  out.offsets_.assign(out.manifold_->size() + 1, 0);
  out.clique_ = std::make_shared<const LeafPartition>(std::move(leaves));
  return out;
}

bool MoveGraph::has_edge(PointId a, PointId b) const {
  auto s = successors(a);
  return std::binary_search(s.begin(), s.end(), b);
}

std::size_t MoveGraph::edge_count() const {
  if (!clique_) return targets_.size();
  std::size_t n = 0;
  for (auto& l : clique_->leaves) n += l.size() * l.size();
  return n;
}

std::size_t MoveGraph::max_out_degree() const {
  std::size_t best = 0;
  for (PointId p = 0; p < size(); ++p) best = std::max(best, successors(p).size());
  return best;
}

MoveGraph build_move_graph(const GeometricStructure& g, double r, std::size_t steps,
                           const MoveOptions& options) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("speed budget r must be positive");
  if (steps == 0) throw InvalidArgument("number of time steps T must be positive");
  if (options.speed_subdivision == 0) throw InvalidArgument("speed subdivision must be positive");
  return build_any(g, r, steps, options);
}

LeafPartition leaf_partition(const MoveGraph& graph) {
  std::size_t n = graph.size();
  std::vector<PointId> parent(n);
  std::iota(parent.begin(), parent.end(), PointId{0});
  auto find = [&](PointId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (PointId p = 0; p < n; ++p)
    for (PointId q : graph.successors(p)) {
      PointId a = find(p), b = find(q);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  LeafPartition out;
  out.leaf_of.assign(n, 0);
  std::vector<std::int64_t> index(n, -1);
  for (PointId p = 0; p < n; ++p) {
    PointId root = find(p);
    if (index[root] < 0) {
      index[root] = static_cast<std::int64_t>(out.leaves.size());
      out.leaves.emplace_back();
    }
    out.leaf_of[p] = static_cast<std::uint32_t>(index[root]);
    out.leaves[static_cast<std::size_t>(index[root])].push_back(p);
  }
  return out;
}

LeafPartition leaf_partition(const GeometricStructure& g, double r_probe, std::size_t steps_probe,
                             const MoveOptions& options) {
  return leaf_partition(build_move_graph(g, r_probe, steps_probe, options));
}

PointMask make_mask(std::size_t n, std::span<const PointId> members) {
  PointMask mask(n, 0);
  for (PointId p : members) {
    if (p >= n) throw InvalidArgument("point id out of range");
    mask[p] = 1;
  }
  return mask;
}

std::uint64_t count_walks(const MoveGraph& g, PointId x, const PointMask& allowed) {
  return count_walks_all(g, allowed)[x];
}

std::vector<std::uint64_t> count_walks_all(const MoveGraph& g, const PointMask& allowed) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::size_t n = g.size();
  auto ok = [&](PointId p) { return allowed.empty() || allowed[p]; };
  // Walks of length k ending anywhere, counted backwards: c_k(p) = sum c_{k-1}(succ).
  std::vector<std::uint64_t> cur(n, 1), next(n);
  for (std::size_t k = 0; k < g.steps(); ++k) {
    for (PointId p = 0; p < n; ++p) {
      if (!ok(p)) {
        next[p] = 0;
        continue;
      }
      std::uint64_t s = 0;
      for (PointId q : g.successors(p)) {
        if (!ok(q)) continue;
        s = cur[q] > kMax - s ? kMax : s + cur[q];
      }
      next[p] = s;
    }
    cur.swap(next);
  }
  for (PointId p = 0; p < n; ++p)
    if (!ok(p)) cur[p] = 0;
  return cur;
}

void enumerate_evader_paths(const MoveGraph& g, PointId x,
                            const std::function<void(std::span<const PointId>)>& visit,
                            const PointMask& allowed, std::size_t budget) {
  auto total = count_walks(g, x, allowed);
  if (total > budget)
    throw BudgetExceeded("exhaustive enumeration needs " + std::to_string(total) +
                         " paths (budget " + std::to_string(budget) + "); switch to beam mode");
  if (total == 0) return;
  std::size_t T = g.steps();
  DiscretePath path(T + 1);
  std::vector<std::size_t> cursor(T + 1, 0);
  path[0] = x;
  std::size_t depth = 0;
  auto ok = [&](PointId p) { return allowed.empty() || allowed[p]; };
  if (T == 0) {
    visit(path);
    return;
  }
  cursor[0] = 0;
  while (true) {
    auto succ = g.successors(path[depth]);
    if (cursor[depth] == succ.size()) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    PointId next = succ[cursor[depth]++];
    if (!ok(next)) continue;
    path[depth + 1] = next;
    if (depth + 1 == T) {
      visit(path);
    } else {
      ++depth;
      cursor[depth] = 0;
    }
  }
}

std::uint64_t beam_tie_key(std::uint64_t seed, std::span<const PointId> path) {
  // splitmix64 over the node sequence
  std::uint64_t h = seed + 0x9e3779b97f4a7c15ULL;
  for (PointId p : path) {
    h ^= static_cast<std::uint64_t>(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return h;
}

std::vector<DiscretePath> beam_evader_paths(
    const MoveGraph& g, PointId x, std::size_t width, std::uint64_t seed,
    const std::function<double(std::span<const PointId>)>& score, const PointMask& allowed) {
  if (width == 0) throw InvalidArgument("beam width must be at least 1");
  auto ok = [&](PointId p) { return allowed.empty() || allowed[p]; };
  if (!ok(x)) return {};
  struct Entry {
    DiscretePath path;
    double score;
    std::uint64_t key;
  };
  std::vector<Entry> beam{{{x}, 0.0, 0}};
  for (std::size_t k = 0; k < g.steps(); ++k) {
    std::vector<Entry> next;
    for (auto& e : beam)
      for (PointId s : g.successors(e.path.back())) {
        if (!ok(s)) continue;
        Entry c{e.path, 0.0, 0};
        c.path.push_back(s);
        c.score = score(c.path);
        c.key = beam_tie_key(seed, c.path);
        next.push_back(std::move(c));
      }
    std::stable_sort(next.begin(), next.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.key < b.key;
    });
    if (next.size() > width) next.resize(width);
    beam.swap(next);
  }
  std::vector<DiscretePath> out;
  out.reserve(beam.size());
  for (auto& e : beam) out.push_back(std::move(e.path));
  return out;
}

}  // namespace geoentropy
