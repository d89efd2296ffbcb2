#include "geoentropy/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "geoentropy/error.hpp"

namespace geoentropy {

namespace {

// Maximum independent set of the subgraph induced by `alive`.
void mis(std::uint64_t alive, const std::vector<std::uint64_t>& adj, std::size_t taken,
         std::size_t& best) {
  if (alive == 0) {
    best = std::max(best, taken);
    return;
  }
  if (taken + static_cast<std::size_t>(std::popcount(alive)) <= best) return;
  int pick = -1;
  int pick_degree = -1;
  for (std::uint64_t rest = alive; rest != 0; rest &= rest - 1) {
    int v = std::countr_zero(rest);
    int d = std::popcount(adj[v] & alive);
    if (d <= 1) {
      pick = v;
      pick_degree = d;
      break;
    }
    if (d > pick_degree) {
      pick = v;
      pick_degree = d;
    }
  }
  std::uint64_t bit = std::uint64_t{1} << pick;
  mis(alive & ~(adj[pick] | bit), adj, taken + 1, best);
  // A vertex of degree <= 1 is always in some maximum independent set.
  if (pick_degree > 1) mis(alive & ~bit, adj, taken, best);
}

std::size_t exact_count(std::span<const double> d, std::size_t n, double eps) {
  std::vector<std::int64_t> component(n, -1);
  std::size_t total = 0;
  std::vector<std::size_t> members;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    members.clear();
    members.push_back(s);
    component[s] = static_cast<std::int64_t>(s);
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::size_t i = members[k];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && component[j] < 0 && d[i * n + j] < eps) {
          component[j] = static_cast<std::int64_t>(s);
          members.push_back(j);
        }
    }
    if (members.size() > kExactComponentLimit)
      throw BudgetExceeded("exact separated count needs a maximum independent set on " +
                           std::to_string(members.size()) + " points (limit " +
                           std::to_string(kExactComponentLimit) + "); use the greedy count");
    std::sort(members.begin(), members.end());
    std::size_t m = members.size();
    std::vector<std::uint64_t> adj(m, 0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b && d[members[a] * n + members[b]] < eps) adj[a] |= std::uint64_t{1} << b;
    std::uint64_t alive = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    std::size_t best = 0;
    mis(alive, adj, 0, best);
    total += best;
  }
  return total;
}

std::size_t greedy_count(std::span<const double> d, std::size_t n, double eps) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = true;
    for (std::size_t j : chosen)
      if (d[i * n + j] < eps) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(i);
  }
  return chosen.size();
}

void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw InvalidArgument(std::string(what) + " is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
      throw InvalidArgument(std::string(what) + " values must be positive and finite");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw InvalidArgument(std::string(what) + " must be strictly ascending");
  }
}

std::size_t saturation_limit(double fraction, std::size_t points) {
  if (!(fraction > 0.0)) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(points))));
}

std::vector<SlopeFit> profile_of(const std::vector<SeparatedCount>& counts,
                                 const std::vector<double>& r_grid, const std::vector<double>& eps_grid,
                                 std::size_t window, std::size_t limit) {
  std::vector<SlopeFit> out;
  if (r_grid.size() < 3) return out;
  std::vector<SeparatedCount> column;
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    column.clear();
    for (std::size_t i = 0; i < r_grid.size(); ++i) column.push_back(counts[i * eps_grid.size() + e]);
    out.push_back(entropy_from_counts(column, window, limit));
  }
  return out;
}

std::size_t leaf_count(const GeometricStructure& g, const EntropyOptions& o) {
  double probe = std::max(o.r_grid.back(), o.matrix.leaf_probe_r);
  return leaf_partition(g, probe, o.steps, o.matrix.moves).count();
}

EntropyEstimate run_pipeline(const GeometricStructure& g, const EntropyOptions& o,
                             std::span<const PointId> U, std::span<const PointId> V, bool local) {
  check_grid(o.r_grid, "r grid");
  check_grid(o.epsilon_grid, "epsilon grid");
  if (o.steps == 0) throw InvalidArgument("number of time steps T must be positive");
  if (o.mode.is_beam() && o.mode.width == 0) throw InvalidArgument("beam width must be at least 1");

  EntropyEstimate est;
  est.local = local;
  auto& diag = est.diagnostics;
  const auto& m = g.manifold();
  diag.floor = m.mesh_scale();

  MatrixOptions mo = o.matrix;
  // Values at or beyond the largest epsilon never change a count.
  double top = o.epsilon_grid.back();
  mo.cutoff = std::min(mo.cutoff, top * (1.0 + 1e-9) + 1e-12);

  auto tally = [&](const PursuitMatrix& pm) {
    diag.exact_pairs += pm.count(Exactness::exact);
    diag.lower_bound_pairs += pm.count(Exactness::lower_bound);
    diag.capped_pairs += pm.count(Exactness::capped);
  };

  for (double r : o.r_grid) {
    auto moves = build_move_graph(g, r, o.steps, o.matrix.moves);
    diag.dropped_edges.push_back(moves.dropped_edges());
    diag.max_out_degree.push_back(moves.max_out_degree());
    diag.snap_error.push_back(moves.max_snap_error());
    PursuitMatrix d;
    if (local) {
      d = local_d_r_matrix(g, r, o.steps, U, V, o.mode, mo);
    } else {
      std::vector<PointId> ids(m.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<PointId>(i);
      d = pursuit_matrix(MatrixKind::d_r, moves, moves, std::move(ids), o.mode, mo);
    }
    tally(d);
    for (double eps : o.epsilon_grid) est.counts.push_back(max_separated(d, eps, o.method));
    if (o.compute_D && !local) {
      auto D = D_r_matrix(g, r, o.steps, o.mode, mo);
      tally(D);
      for (std::size_t i = 0; i < D.size(); ++i)
        for (std::size_t j = i + 1; j < D.size(); ++j) {
          // Capped entries only certify "at least the cutoff".
          bool both_known = D.exactness(i, j) != Exactness::capped && d.exactness(i, j) != Exactness::capped;
          if (both_known && D.value(i, j) > d.value(i, j) * (1.0 + 1e-12)) ++diag.D_above_d;
        }
      for (double eps : o.epsilon_grid) est.counts_D.push_back(max_separated(D, eps, o.method));
      if (o.keep_matrices) est.matrices_D.push_back(std::move(D));
    }
    if (o.keep_matrices) est.matrices.push_back(std::move(d));
  }
  diag.points = m.size();
  if (local) {
    std::vector<PointId> ids(U.begin(), U.end());
    std::sort(ids.begin(), ids.end());
    diag.points = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }
  diag.all_exact = diag.lower_bound_pairs == 0;
  diag.lemma_constant = lemma_constant(g, o.steps, o.lemma_rho.empty() ? std::span<const double>(o.r_grid)
                                                                      : std::span<const double>(o.lemma_rho),
                                       o.matrix.moves);
  diag.leaves = leaf_count(g, o);

  auto limit = saturation_limit(o.saturation, diag.points);
  est.profile = profile_of(est.counts, o.r_grid, o.epsilon_grid, o.fit_window, limit);
  if (!est.profile.empty()) {
    auto k = headline_index(est.profile, diag.floor);
    est.h = est.profile[k].slope;
    est.headline_epsilon = est.profile[k].epsilon;
  }
  if (!est.counts_D.empty()) {
    est.profile_D = profile_of(est.counts_D, o.r_grid, o.epsilon_grid, o.fit_window, limit);
    if (!est.profile_D.empty()) {
      auto k = headline_index(est.profile_D, diag.floor);
      est.H = est.profile_D[k].slope;
    }
  }
  return est;
}

}  // namespace

std::string_view to_string(CountMethod m) { return m == CountMethod::exact ? "exact" : "greedy"; }

std::size_t max_separated(std::span<const double> matrix, std::size_t n, double epsilon,
                          CountMethod method) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (matrix.size() != n * n) throw InvalidArgument("matrix size does not match point count");
  if (n == 0) return 0;
  return method == CountMethod::exact ? exact_count(matrix, n, epsilon) : greedy_count(matrix, n, epsilon);
}

SeparatedCount max_separated(const PursuitMatrix& matrix, double epsilon, CountMethod method) {
  return {matrix.r(), epsilon, max_separated(matrix.values(), matrix.size(), epsilon, method), method};
}

SlopeFit entropy_from_counts(std::span<const SeparatedCount> counts, std::size_t window,
                             std::size_t saturation_limit) {
  if (counts.empty()) throw InvalidArgument("no counts to fit");
  std::vector<SeparatedCount> sorted(counts.begin(), counts.end());
  for (auto& c : sorted) {
    if (c.epsilon != sorted.front().epsilon || c.method != sorted.front().method)
      throw InvalidArgument("counts must share one epsilon and one method");
    if (c.count == 0) throw InvalidArgument("separated counts must be positive");
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.r < b.r; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].r == sorted[i - 1].r) throw InvalidArgument("duplicate r value in counts");
  std::size_t m = sorted.size();
  if (m < 3) throw InvalidArgument("slope fit needs at least 3 distinct r values");
  std::size_t w = window == 0 ? std::max<std::size_t>(3, (m + 1) / 2) : window;
  if (w < 3) throw InvalidArgument("fit window must hold at least 3 points");
  bool saturated = false;
  if (saturation_limit > 0) {
    std::size_t keep = 0;
    while (keep < m && sorted[keep].count <= saturation_limit) ++keep;
    if (keep < 3) saturated = true;
    else m = keep;
  }
  w = std::min(w, m);
  std::span<const SeparatedCount> fit(sorted.data() + (m - w), w);

  double mr = 0.0, my = 0.0;
  for (auto& c : fit) {
    mr += c.r;
    my += std::log(static_cast<double>(c.count));
  }
  mr /= static_cast<double>(w);
  my /= static_cast<double>(w);
  double sxx = 0.0, sxy = 0.0;
  for (auto& c : fit) {
    double dx = c.r - mr;
    sxx += dx * dx;
    sxy += dx * (std::log(static_cast<double>(c.count)) - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("r values in the fit window have zero variance");
  SlopeFit out;
  out.epsilon = fit.front().epsilon;
  out.raw_slope = sxy / sxx;
  out.slope = std::max(0.0, out.raw_slope);
  double ss = 0.0;
  for (auto& c : fit) {
    double e = std::log(static_cast<double>(c.count)) - (my + out.raw_slope * (c.r - mr));
    ss += e * e;
  }
  out.residual = std::sqrt(ss / static_cast<double>(w));
  out.r_first = fit.front().r;
  out.r_last = fit.back().r;
  out.points = w;
  out.saturated = saturated;
  return out;
}

std::size_t headline_index(std::span<const SlopeFit> profile, double floor) {
  if (profile.empty()) throw InvalidArgument("empty slope profile");
  std::optional<std::size_t> best, first_above;
  for (std::size_t e = 0; e < profile.size(); ++e) {
    if (profile[e].epsilon < floor * (1.0 - 1e-12)) continue;
    if (!first_above) first_above = e;
    if (!profile[e].saturated && (!best || profile[e].slope > profile[*best].slope)) best = e;
  }
  return best.value_or(first_above.value_or(profile.size() - 1));
}

EntropyEstimate estimate_entropy(const GeometricStructure& g, const EntropyOptions& options) {
  return run_pipeline(g, options, {}, {}, false);
}

EntropyEstimate local_entropy(const GeometricStructure& g, std::span<const PointId> K,
                              std::span<const PointId> U, std::span<const PointId> V,
                              const EntropyOptions& options) {
  std::size_t n = g.manifold().size();
  if (K.empty() || U.empty() || V.empty()) throw InvalidArgument("local entropy needs nonempty K, U and V");
  auto u = make_mask(n, U);
  auto v = make_mask(n, V);
  for (PointId p : K)
    if (p >= n || !u[p]) throw InvalidArgument("K must lie inside U");
  for (PointId p : U)
    if (!v[p]) throw InvalidArgument("U must lie inside V");
  return run_pipeline(g, options, U, V, true);
}

std::vector<PointId> flow_map(const SampledManifold& m, const VectorField& field, double dt,
                              double snap_tolerance, double* max_snap_error) {
  if (field.size() != m.size()) throw InvalidArgument("vector field size does not match the sample");
  if (!(dt > 0.0)) throw InvalidArgument("flow time step must be positive");
  double tol = snap_tolerance < 0.0 ? m.mesh_scale() : snap_tolerance;
  std::vector<PointId> out(m.size());
  double worst = 0.0;
  Coords end(m.dim());
  for (PointId p = 0; p < m.size(); ++p) {
    auto x = m.coords(p);
    if (field[p].size() != m.dim()) throw InvalidArgument("vector field has the wrong dimension");
    for (std::size_t i = 0; i < m.dim(); ++i) end[i] = x[i] + dt * field[p][i];
    auto [to, dist] = m.snap_with_distance(end);
    if (dist > tol + 1e-12)
      throw InvalidArgument("flow step from point " + std::to_string(p) + " lands " + std::to_string(dist) +
                            " away from the sample (tolerance " + std::to_string(tol) + ")");
    worst = std::max(worst, dist);
    out[p] = to;
  }
  if (max_snap_error) *max_snap_error = worst;
  return out;
}

FlowEstimate bowen_dinaburg(const SampledManifold& m, const VectorField& field, const FlowOptions& o) {
  check_grid(o.r_grid, "r grid");
  check_grid(o.epsilon_grid, "epsilon grid");
  FlowEstimate out;
  out.time_step = o.time_step > 0.0 ? o.time_step : m.mesh_scale();
  auto phi = flow_map(m, field, out.time_step, o.snap_tolerance, &out.max_snap_error);
  std::size_t n = m.size();
  // d^X accumulated along the orbit; orbit[p] = phi^k(p).
  std::vector<double> acc(m.metric());
  std::vector<PointId> orbit(n);
  for (PointId p = 0; p < n; ++p) orbit[p] = p;
  std::size_t k = 0;
  for (double r : o.r_grid) {
    auto target = static_cast<std::size_t>(std::floor(r / out.time_step + 1e-9));
    while (k < target) {
      for (PointId p = 0; p < n; ++p) orbit[p] = phi[orbit[p]];
      ++k;
      for (std::size_t i = 0; i < n; ++i) {
        auto row = m.row(orbit[i]);
        for (std::size_t j = 0; j < n; ++j) acc[i * n + j] = std::max(acc[i * n + j], row[orbit[j]]);
      }
    }
    for (double eps : o.epsilon_grid)
      out.counts.push_back({r, eps, max_separated(acc, n, eps, o.method), o.method});
  }
  out.profile = profile_of(out.counts, o.r_grid, o.epsilon_grid, o.fit_window, saturation_limit(o.saturation, n));
  if (!out.profile.empty()) {
    auto idx = headline_index(out.profile, m.mesh_scale());
    out.h_top = out.profile[idx].slope;
    out.headline_epsilon = out.profile[idx].epsilon;
  }
  return out;
}

double lemma_constant(const GeometricStructure& g, std::size_t steps, std::span<const double> rho_grid,
                      const MoveOptions& options) {
  if (rho_grid.empty()) throw InvalidArgument("rho grid is empty");
  const auto& m = g.manifold();
  std::size_t n = m.size();
  double best = 0.0;
  std::vector<char> cur(n), next(n);
  for (double rho : rho_grid) {
    auto moves = build_move_graph(g, rho, steps, options);
    for (PointId x = 0; x < n; ++x) {
      std::fill(cur.begin(), cur.end(), 0);
      cur[x] = 1;
      for (std::size_t k = 0; k < steps; ++k) {
        std::fill(next.begin(), next.end(), 0);
        for (PointId p = 0; p < n; ++p)
          if (cur[p])
            for (PointId q : moves.successors(p)) next[q] = 1;
        cur.swap(next);
      }
      auto row = m.row(x);
      for (PointId p = 0; p < n; ++p)
        if (cur[p]) best = std::max(best, row[p] / rho);
    }
  }
  return best;
}

std::optional<double> reach_speed(const GeometricStructure& g, PointId x, PointId y, std::size_t steps,
                                  std::span<const double> rho_grid, const MoveOptions& options) {
  std::size_t n = g.manifold().size();
  if (x >= n || y >= n) throw InvalidArgument("point id out of range");
  std::vector<char> cur(n), next(n);
  for (double rho : rho_grid) {
    auto moves = build_move_graph(g, rho, steps, options);
    std::fill(cur.begin(), cur.end(), 0);
    cur[x] = 1;
    for (std::size_t k = 0; k < steps; ++k) {
      std::fill(next.begin(), next.end(), 0);
      for (PointId p = 0; p < n; ++p)
        if (cur[p])
          for (PointId q : moves.successors(p)) next[q] = 1;
      cur.swap(next);
    }
    if (cur[y]) return rho;
  }
  return std::nullopt;
}

}  // namespace geoentropy
