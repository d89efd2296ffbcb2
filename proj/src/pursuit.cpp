#include "geoentropy/pursuit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "geoentropy/error.hpp"

namespace geoentropy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Layer = std::vector<std::pair<PointId, double>>;

bool allowed(const PointMask& mask, PointId p) { return mask.empty() || mask[p] != 0; }

// Bottleneck DP over pursuer positions. f holds, for each reachable pursuer
// node w at the current depth, the best running max distance so far.
class Solver {
 public:
  Solver(const MoveGraph& evader, const MoveGraph& pursuer, const Confinement& confinement)
      : evader_(evader),
        pursuer_(pursuer),
        conf_(confinement),
        metric_(evader.manifold()),
        scratch_(pursuer.size(), kInf) {
    if (evader.size() != pursuer.size())
      throw InvalidArgument("evader and pursuer graphs live on different samples");
    if (evader.steps() != pursuer.steps())
      throw InvalidArgument("evader and pursuer graphs use different step counts");
    if (const auto* leaves = pursuer.clique_leaves()) leaf_min_.assign(leaves->count(), kInf);
  }

  // g(w) = min over predecessors u of w of f(u).
  void relax(const Layer& f, Layer& g) {
    g.clear();
    if (const auto* leaves = pursuer_.clique_leaves()) {
      for (auto [w, v] : f) {
        auto l = leaves->leaf_of[w];
        if (leaf_min_[l] == kInf) touched_leaves_.push_back(l);
        leaf_min_[l] = std::min(leaf_min_[l], v);
      }
      for (auto l : touched_leaves_) {
        for (PointId z : leaves->leaves[l])
          if (allowed(conf_.pursuer, z)) g.emplace_back(z, leaf_min_[l]);
        leaf_min_[l] = kInf;
      }
      touched_leaves_.clear();
      return;
    }
    for (auto [w, v] : f)
      for (PointId z : pursuer_.successors(w)) {
        if (!allowed(conf_.pursuer, z)) continue;
        if (scratch_[z] == kInf) touched_.push_back(z);
        scratch_[z] = std::min(scratch_[z], v);
      }
    for (PointId z : touched_) {
      g.emplace_back(z, scratch_[z]);
      scratch_[z] = kInf;
    }
    touched_.clear();
  }

  Layer start(PointId x, PointId y) const {
    return {{y, metric_.distance(x, y)}};
  }

  void extend(const Layer& g, PointId z, Layer& out) const {
    auto row = metric_.row(z);
    out.clear();
    out.reserve(g.size());
    for (auto [w, v] : g) out.emplace_back(w, std::max(row[w], v));
  }

  double close(const Layer& g, PointId z) const {
    auto row = metric_.row(z);
    double best = kInf;
    for (auto [w, v] : g) best = std::min(best, std::max(row[w], v));
    return best;
  }

  double value_of(std::span<const PointId> gamma, PointId y) {
    Layer f = start(gamma[0], y), g;
    for (std::size_t k = 1; k < gamma.size(); ++k) {
      relax(f, g);
      if (g.empty()) return kInf;
      extend(g, gamma[k], f);
    }
    double best = kInf;
    for (auto [w, v] : f) best = std::min(best, v);
    return best;
  }

  PursuitResult exhaustive(PointId x, PointId y, double cutoff) {
    std::size_t T = evader_.steps();
    f_.assign(T + 1, {});
    g_.assign(T + 1, {});
    best_ = -kInf;
    cutoff_ = cutoff;
    stopped_ = false;
    f_[0] = start(x, y);
    if (f_[0][0].second >= cutoff) return {f_[0][0].second, Exactness::capped};
    dfs(0, x);
    if (stopped_) return {best_, Exactness::capped};
    return {best_, Exactness::exact};
  }

  PursuitResult beam(PointId x, PointId y, std::size_t width, std::uint64_t seed, double cutoff) {
    if (width == 0) throw InvalidArgument("beam width must be at least 1");
    struct Entry {
      DiscretePath path;
      Layer f;
      double score;
      std::uint64_t key;
    };
    std::size_t T = evader_.steps();
    std::vector<Entry> beam;
    beam.push_back({{x}, start(x, y), 0.0, 0});
    if (beam[0].f[0].second >= cutoff) return {beam[0].f[0].second, Exactness::capped};
    bool truncated = false;
    double best = -kInf;
    Layer g;
    for (std::size_t k = 0; k < T; ++k) {
      std::vector<Entry> next;
      bool last = k + 1 == T;
      for (auto& e : beam) {
        relax(e.f, g);
        for (PointId z : evader_.successors(e.path.back())) {
          if (!allowed(conf_.evader, z)) continue;
          if (last) {
            best = std::max(best, close(g, z));
            if (best >= cutoff) return {best, Exactness::capped};
            continue;
          }
          Entry c{e.path, {}, 0.0, 0};
          c.path.push_back(z);
          extend(g, z, c.f);
          double lo = kInf;
          for (auto [w, v] : c.f) lo = std::min(lo, v);
          c.score = lo;
          c.key = beam_tie_key(seed, c.path);
          next.push_back(std::move(c));
        }
      }
      if (last) break;
      std::sort(next.begin(), next.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.key < b.key;
      });
      if (next.size() > width) {
        truncated = true;
        next.resize(width);
      }
      beam.swap(next);
    }
    return {best, truncated ? Exactness::lower_bound : Exactness::exact};
  }

 private:
  void dfs(std::size_t k, PointId node) {
    relax(f_[k], g_[k]);
    const Layer& g = g_[k];
    bool last = k + 1 == evader_.steps();
    for (PointId z : evader_.successors(node)) {
      if (!allowed(conf_.evader, z)) continue;
      if (last) {
        best_ = std::max(best_, close(g, z));
        if (best_ >= cutoff_) {
          stopped_ = true;
          return;
        }
        continue;
      }
      extend(g, z, f_[k + 1]);
      dfs(k + 1, z);
      if (stopped_) return;
    }
  }

  const MoveGraph& evader_;
  const MoveGraph& pursuer_;
  const Confinement& conf_;
  const SampledManifold& metric_;
  std::vector<double> scratch_;
  std::vector<PointId> touched_;
  std::vector<double> leaf_min_;
  std::vector<std::uint32_t> touched_leaves_;
  std::vector<Layer> f_, g_;
  double best_ = 0.0;
  double cutoff_ = kInf;
  bool stopped_ = false;
};

void check_confinement(const Confinement& c, std::size_t n) {
  if (!c.evader.empty() && c.evader.size() != n)
    throw InvalidArgument("evader confinement mask has the wrong size");
  if (!c.pursuer.empty() && c.pursuer.size() != n)
    throw InvalidArgument("pursuer confinement mask has the wrong size");
}

PursuitResult solve(Solver& solver, PointId x, PointId y, const SolveMode& mode,
                    const MoveGraph& evader, const Confinement& conf, double cutoff,
                    std::uint64_t walks) {
  if (!allowed(conf.evader, x)) throw InvalidArgument("evader start lies outside its confinement");
  if (!allowed(conf.pursuer, y)) throw InvalidArgument("pursuer start lies outside its confinement");
  if (evader.steps() == 0) return {evader.manifold().distance(x, y), Exactness::exact};
  if (mode.is_beam()) return solver.beam(x, y, mode.width, mode.seed, cutoff);
  if (walks > mode.budget)
    throw BudgetExceeded("exhaustive search needs " + std::to_string(walks) +
                         " evader paths (budget " + std::to_string(mode.budget) +
                         "); switch to beam mode");
  return solver.exhaustive(x, y, cutoff);
}

Exactness combine(Exactness a, Exactness b) {
  if (a == Exactness::capped || b == Exactness::capped) return Exactness::capped;
  if (a == Exactness::lower_bound || b == Exactness::lower_bound) return Exactness::lower_bound;
  return Exactness::exact;
}

}  // namespace

std::string_view to_string(Exactness e) {
  switch (e) {
    case Exactness::exact: return "exact";
    case Exactness::lower_bound: return "lower_bound";
    case Exactness::capped: return "capped";
  }
  return "?";
}

std::string_view to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::d_r: return "d_r";
    case MatrixKind::D_r: return "D_r";
    case MatrixKind::local_d_r: return "local_d_r";
  }
  return "?";
}

double pursuit_value(std::span<const PointId> gamma, PointId y, const MoveGraph& pursuer,
                     const PointMask& confine_pursuer) {
  if (gamma.empty()) throw InvalidArgument("evader path is empty");
  if (gamma.size() != pursuer.steps() + 1)
    throw InvalidArgument("evader path length does not match the pursuer step count");
  Confinement conf{{}, confine_pursuer};
  check_confinement(conf, pursuer.size());
  if (!allowed(confine_pursuer, y)) throw InvalidArgument("pursuer start lies outside its confinement");
  Solver solver(pursuer, pursuer, conf);
  return solver.value_of(gamma, y);
}

PursuitResult delta_r(PointId x, PointId y, const MoveGraph& evader, const MoveGraph& pursuer,
                      const SolveMode& mode, const Confinement& confinement, double cutoff) {
  check_confinement(confinement, evader.size());
  if (x >= evader.size() || y >= evader.size()) throw InvalidArgument("point id out of range");
  Solver solver(evader, pursuer, confinement);
  std::uint64_t walks = mode.is_beam() ? 0 : count_walks(evader, x, confinement.evader);
  return solve(solver, x, y, mode, evader, confinement, cutoff, walks);
}

PursuitMatrix::PursuitMatrix(MatrixKind kind, double r, std::size_t steps, SolveMode mode,
                             std::vector<PointId> ids)
    : kind_(kind), r_(r), steps_(steps), mode_(mode), ids_(std::move(ids)) {
  values_.assign(ids_.size() * ids_.size(), 0.0);
  flags_.assign(ids_.size() * ids_.size(), Exactness::exact);
}

void PursuitMatrix::set(std::size_t i, std::size_t j, double v, Exactness e) {
  values_[i * size() + j] = v;
  values_[j * size() + i] = v;
  flags_[i * size() + j] = e;
  flags_[j * size() + i] = e;
}

bool PursuitMatrix::all_exact() const {
  return std::all_of(flags_.begin(), flags_.end(), [](Exactness e) { return e == Exactness::exact; });
}

std::size_t PursuitMatrix::count(Exactness e) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) n += flags_[i * size() + j] == e;
  return n;
}

PursuitMatrix pursuit_matrix(MatrixKind kind, const MoveGraph& evader, const MoveGraph& pursuer,
                             std::vector<PointId> ids, const SolveMode& mode,
                             const MatrixOptions& options, const Confinement& confinement) {
  check_confinement(confinement, evader.size());
  for (PointId p : ids)
    if (p >= evader.size()) throw InvalidArgument("point id out of range");
  PursuitMatrix out(kind, evader.speed_budget(), evader.steps(), mode, ids);
  out.set_cutoff(options.cutoff);
  std::vector<std::uint64_t> walks;
  if (!mode.is_beam()) {
    walks = count_walks_all(evader, confinement.evader);
    for (PointId p : ids)
      if (walks[p] > mode.budget)
        throw BudgetExceeded("exhaustive search needs " + std::to_string(walks[p]) +
                             " evader paths from point " + std::to_string(p) + " (budget " +
                             std::to_string(mode.budget) + "); switch to beam mode");
  }
  std::size_t n = ids.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - (n > 0)) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  double cutoff = options.cutoff;
  auto work = [&](Solver& solver, std::size_t i, std::size_t j) {
    PointId x = ids[i], y = ids[j];
    auto w = [&](PointId p) { return walks.empty() ? 0 : walks[p]; };
    // delta >= d(x, y) on both sides, so 2 d(x, y) already bounds the sum.
    double base = evader.manifold().distance(x, y);
    if (2.0 * base >= cutoff) {
      out.set(i, j, 2.0 * base, Exactness::capped);
      return;
    }
    auto a = solve(solver, x, y, mode, evader, confinement, cutoff - base, w(x));
    if (a.exactness == Exactness::capped) {
      out.set(i, j, a.value + base, Exactness::capped);
      return;
    }
    auto b = solve(solver, y, x, mode, evader, confinement, cutoff - a.value, w(y));
    out.set(i, j, a.value + b.value, combine(a.exactness, b.exactness));
  };

  std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, pairs.size()));
  if (jobs == 1) {
    Solver solver(evader, pursuer, confinement);
    for (auto [i, j] : pairs) work(solver, i, j);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      try {
        Solver solver(evader, pursuer, confinement);
        for (std::size_t k = next++; k < pairs.size(); k = next++) work(solver, pairs[k].first, pairs[k].second);
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = pairs.size();
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

std::vector<PointId> all_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<PointId>(i);
  return ids;
}

}  // namespace

PursuitMatrix d_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                         const SolveMode& mode, const MatrixOptions& options) {
  auto moves = build_move_graph(g, r, steps, options.moves);
  return pursuit_matrix(MatrixKind::d_r, moves, moves, all_ids(g.manifold().size()), mode, options);
}

PursuitMatrix D_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                         const SolveMode& mode, const MatrixOptions& options) {
  auto evader = build_move_graph(g, r, steps, options.moves);
  MoveGraph pursuer;
  if (options.pursuer_speed) {
    if (*options.pursuer_speed < r) throw InvalidArgument("pursuer speed must be at least r");
    pursuer = build_move_graph(g, *options.pursuer_speed, steps, options.moves);
  } else {
    double probe = std::max(r, options.leaf_probe_r);
    auto leaves = probe == r ? leaf_partition(evader) : leaf_partition(g, probe, steps, options.moves);
    pursuer = MoveGraph::leaf_cliques(g.manifold_ptr(), std::move(leaves), steps);
  }
  return pursuit_matrix(MatrixKind::D_r, evader, pursuer, all_ids(g.manifold().size()), mode, options);
}

PursuitMatrix local_d_r_matrix(const GeometricStructure& g, double r, std::size_t steps,
                               std::span<const PointId> U, std::span<const PointId> V,
                               const SolveMode& mode, const MatrixOptions& options) {
  std::size_t n = g.manifold().size();
  if (U.empty()) throw InvalidArgument("evader region U is empty");
  Confinement conf{make_mask(n, U), make_mask(n, V)};
  for (PointId p : U)
    if (!conf.pursuer[p]) throw InvalidArgument("evader region U must lie inside pursuer region V");
  auto moves = build_move_graph(g, r, steps, options.moves);
  std::vector<PointId> ids(U.begin(), U.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return pursuit_matrix(MatrixKind::local_d_r, moves, moves, std::move(ids), mode, options, conf);
}

}  // namespace geoentropy
