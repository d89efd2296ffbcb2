#include "geoentropy/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "geoentropy/error.hpp"
#include "geoentropy/report.hpp"
#include "json.hpp"

namespace geoentropy {

namespace {

// Sum matrices larger than this skip the pairwise factorization.
constexpr std::size_t kFactorizationLimit = 400;
// Exhaustive triple check up to this many points, sampled beyond.
constexpr std::size_t kTripleLimit = 200;
constexpr std::size_t kTripleSample = 2000000;

std::string label(const std::string& what, double v) { return what + "=" + format_number(v); }

void add(CheckReport& rep, std::string name, double measured, double bound) {
  rep.assertions.push_back({std::move(name), measured <= bound, measured, bound});
}

std::vector<PointId> all_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<PointId>(i);
  return ids;
}

MatrixOptions uncut(const EntropyOptions& o) {
  MatrixOptions mo = o.matrix;
  mo.cutoff = std::numeric_limits<double>::infinity();
  return mo;
}

double largest(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v)
    if (std::isfinite(x)) m = std::max(m, x);
  return m;
}

// Largest d_ij - d_ik - d_kj over all (or sampled) triples.
double triangle_excess(const std::vector<double>& d, std::size_t n) {
  double worst = -std::numeric_limits<double>::infinity();
  if (n < 3) return 0.0;
  if (n <= kTripleLimit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double dik = d[i * n + k];
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, d[i * n + j] - dik - d[k * n + j]);
      }
    return worst;
  }
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<std::size_t>(state % n);
  };
  for (std::size_t s = 0; s < kTripleSample; ++s) {
    std::size_t i = next(), j = next(), k = next();
    worst = std::max(worst, d[i * n + j] - d[i * n + k] - d[k * n + j]);
  }
  return worst;
}

std::vector<SeparatedCount> counts_of(const PursuitMatrix& m, const EntropyOptions& o, double r) {
  std::vector<SeparatedCount> out;
  for (double eps : o.epsilon_grid) {
    auto c = max_separated(m, eps, o.method);
    c.r = r;
    out.push_back(c);
  }
  return out;
}

std::vector<SlopeFit> profile(const std::vector<SeparatedCount>& counts, std::size_t rs, std::size_t es,
                              std::size_t window) {
  std::vector<SlopeFit> out;
  std::vector<SeparatedCount> column;
  for (std::size_t e = 0; e < es; ++e) {
    column.clear();
    for (std::size_t i = 0; i < rs; ++i) column.push_back(counts[i * es + e]);
    out.push_back(entropy_from_counts(column, window));
  }
  return out;
}

FlowOptions flow_options(const ExperimentConfig& c) {
  FlowOptions f;
  f.r_grid = c.entropy.r_grid;
  f.epsilon_grid = c.entropy.epsilon_grid;
  f.method = c.entropy.method;
  f.fit_window = c.entropy.fit_window;
  f.saturation = c.entropy.saturation;
  if (c.flow) {
    f.r_grid = c.flow->r_grid;
    f.epsilon_grid = c.flow->epsilon_grid;
    f.time_step = c.flow->time_step;
    if (c.flow->fit_window) f.fit_window = c.flow->fit_window;
  }
  if (c.entropy.matrix.moves.snap_tolerance >= 0.0) f.snap_tolerance = c.entropy.matrix.moves.snap_tolerance;
  return f;
}

const StructureSpec& require_zoo(const ExperimentConfig& c, std::string_view suite) {
  if (c.structure.kind != StructureSpec::Kind::zoo)
    throw ConfigError("structure", std::string(suite) + " needs a zoo structure");
  return c.structure;
}

void metric_axioms(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& o = c.entropy;
  std::size_t n = g->manifold().size();
  const auto& base = g->manifold().metric();
  std::vector<PursuitMatrix> mats;
  for (double r : o.r_grid) {
    auto d = d_r_matrix(*g, r, o.steps, o.mode, uncut(o));
    const auto& v = d.values();
    std::string at = label("r", r) + " ";
    double asym = 0.0, diag = 0.0, below = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      diag = std::max(diag, std::fabs(v[i * n + i]));
      for (std::size_t j = 0; j < n; ++j) {
        asym = std::max(asym, std::fabs(v[i * n + j] - v[j * n + i]));
        if (i != j) below = std::max(below, 2.0 * base[i * n + j] - v[i * n + j]);
      }
    }
    double scale = largest(v);
    add(rep, at + "non-exact pairs", static_cast<double>(d.size() * (d.size() - 1) / 2 - d.count(Exactness::exact)),
        0.0);
    add(rep, at + "zero diagonal", diag, 0.0);
    add(rep, at + "symmetry", asym, 0.0);
    add(rep, at + "d_r >= 2d", std::max(0.0, below), 1e-12 * scale);
    add(rep, at + "triangle inequality", std::max(0.0, triangle_excess(v, n)), 1e-12 * scale);
    mats.push_back(std::move(d));
  }
  for (std::size_t k = 0; k + 1 < mats.size(); ++k) {
    const auto& a = mats[k].values();
    const auto& b = mats[k + 1].values();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a[i] - b[i]);
    add(rep, "monotone " + label("r", o.r_grid[k]) + " -> " + label("r", o.r_grid[k + 1]), worst, 0.0);
  }
  if (n > kTripleLimit)
    rep.notes.push_back("triangle inequality sampled over " + std::to_string(kTripleSample) + " triples");
}

void homogeneity(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& o = c.entropy;
  std::size_t rs = o.r_grid.size(), es = o.epsilon_grid.size();
  std::vector<SeparatedCount> base_counts;
  std::vector<PursuitMatrix> base;
  for (double r : o.r_grid) {
    base.push_back(d_r_matrix(*g, r, o.steps, o.mode, uncut(o)));
    auto cs = counts_of(base.back(), o, r);
    base_counts.insert(base_counts.end(), cs.begin(), cs.end());
  }
  auto base_profile = profile(base_counts, rs, es, o.fit_window);
  for (double gamma : c.checks.gammas) {
    auto gs = scale_norm(g, gamma);
    std::string at = label("gamma", gamma) + " ";
    std::vector<SeparatedCount> counts;
    for (std::size_t k = 0; k < rs; ++k) {
      double r = o.r_grid[k];
      auto m1 = build_move_graph(*g, r, o.steps, o.matrix.moves);
      auto m2 = build_move_graph(*gs, gamma * r, o.steps, o.matrix.moves);
      std::size_t differ = 0;
      for (PointId p = 0; p < m1.size(); ++p) {
        auto a = m1.successors(p);
        auto b = m2.successors(p);
        if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) ++differ;
      }
      add(rep, at + label("r", r) + " move lists differing", static_cast<double>(differ), 0.0);
      auto d = d_r_matrix(*gs, gamma * r, o.steps, o.mode, uncut(o));
      const auto& x = base[k].values();
      const auto& y = d.values();
      std::size_t bits = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (std::memcmp(&x[i], &y[i], sizeof(double)) != 0) ++bits;
      add(rep, at + label("r", r) + " matrix entries not bit-identical", static_cast<double>(bits), 0.0);
      auto cs = counts_of(d, o, gamma * r);
      counts.insert(counts.end(), cs.begin(), cs.end());
    }
    auto scaled = profile(counts, rs, es, o.fit_window);
    for (std::size_t e = 0; e < es; ++e) {
      double want = base_profile[e].raw_slope;
      double got = gamma * scaled[e].raw_slope;
      add(rep, at + label("eps", o.epsilon_grid[e]) + " |slope - gamma * scaled slope|", std::fabs(want - got),
          1e-9 * std::max(1.0, std::fabs(want)));
    }
  }
}

void additivity(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  auto g1 = g->first(), g2 = g->second();
  const auto& o = c.entropy;
  std::size_t n = g->manifold().size();
  if (n <= kFactorizationLimit) {
    const auto& m2 = g2->manifold();
    std::size_t n2 = m2.size();
    for (double r : o.r_grid) {
      double budget = r / g->norm_scale();
      auto mv = build_move_graph(*g, r, o.steps, o.matrix.moves);
      auto a = build_move_graph(*g1, budget, o.steps, o.matrix.moves);
      auto b = build_move_graph(*g2, budget, o.steps, o.matrix.moves);
      std::size_t n1 = g1->manifold().size();
      std::vector<double> d1(n1 * n1), d2(n2 * n2);
      for (PointId x = 0; x < n1; ++x)
        for (PointId y = 0; y < n1; ++y) d1[x * n1 + y] = delta_r(x, y, a, a, o.mode).value;
      for (PointId x = 0; x < n2; ++x)
        for (PointId y = 0; y < n2; ++y) d2[x * n2 + y] = delta_r(x, y, b, b, o.mode).value;
      double worst = 0.0;
      for (PointId x = 0; x < n; ++x)
        for (PointId y = 0; y < n; ++y) {
          double sum = delta_r(x, y, mv, mv, o.mode).value;
          double fac = std::max(d1[(x / n2) * n1 + y / n2], d2[(x % n2) * n2 + y % n2]);
          worst = std::max(worst, std::fabs(sum - fac));
        }
      add(rep, label("r", r) + " |delta_sum - max(delta_1, delta_2)|", worst, 0.0);
    }
  } else {
    rep.notes.push_back("pairwise factorization skipped: " + std::to_string(n) + " points exceed " +
                        std::to_string(kFactorizationLimit));
  }
  double h = estimate_entropy(*g, o).h;
  double h1 = estimate_entropy(*g1, o).h;
  double h2 = estimate_entropy(*g2, o).h;
  rep.notes.push_back("h_sum=" + format_number(h) + " h_1=" + format_number(h1) + " h_2=" + format_number(h2));
  double parts = h1 + h2;
  if (parts > c.checks.zero_tolerance)
    add(rep, "|h_sum - (h_1 + h_2)| / (h_1 + h_2)", std::fabs(h - parts) / parts, c.checks.additivity_tolerance);
  else
    add(rep, "|h_sum - (h_1 + h_2)|", std::fabs(h - parts), c.checks.zero_tolerance);
}

void zero_entropy(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& o = c.entropy;
  auto est = estimate_entropy(*g, o);
  for (auto& f : est.profile) {
    if (f.epsilon < est.diagnostics.floor * (1.0 - 1e-12)) continue;
    add(rep, label("eps", f.epsilon) + " slope", f.slope, c.checks.zero_tolerance);
  }
  add(rep, "h", est.h, c.checks.zero_tolerance);
  if (!c.checks.spread) return;
  std::size_t n = g->manifold().size();
  std::vector<double> lo(n * n, std::numeric_limits<double>::infinity()), hi(n * n, 0.0);
  double snap = 0.0;
  for (double r : o.r_grid) {
    auto moves = build_move_graph(*g, r, o.steps, o.matrix.moves);
    snap = std::max(snap, moves.max_snap_error());
    auto d = pursuit_matrix(MatrixKind::d_r, moves, moves, all_ids(n), o.mode, uncut(o));
    const auto& v = d.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) spread = std::max(spread, hi[i] - lo[i]);
  // Each of the two players drifts at most one snap distance per step.
  double noise = 4.0 * static_cast<double>(o.steps) * snap;
  add(rep, "max over pairs of max_r d_r - min_r d_r", spread, noise + 1e-12 * largest(hi));
}

double flow_entropy(const StructureSpec& s, ManifoldPtr m, const ExperimentConfig& c, CheckReport& rep,
                    const char* what) {
  auto field = zoo_vector_field(s.name, *m, s.params);
  auto flow = bowen_dinaburg(*m, field, flow_options(c));
  rep.notes.push_back(std::string(what) + " h_top=" + format_number(flow.h_top) + " at eps=" +
                      format_number(flow.headline_epsilon) + " (flow step " + format_number(flow.time_step) +
                      ", snap error " + format_number(flow.max_snap_error) + ")");
  return flow.h_top;
}

void vector_theorem(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& s = require_zoo(c, "vector-theorem");
  const auto& entry = zoo_entry(s.name);
  if (!entry.vector_field) throw ConfigError("structure.zoo", "vector-theorem needs a vector-field structure");
  auto est = estimate_entropy(*g, c.entropy);
  rep.notes.push_back("h=" + format_number(est.h) + " at eps=" + format_number(est.headline_epsilon));
  double top = flow_entropy(s, g->manifold_ptr(), c, rep, "flow");
  add(rep, "|h - 2 h_top|", std::fabs(est.h - 2.0 * top), c.checks.vector_tolerance);
  double known = known_flow_entropy(s.name);
  if (known > 0.0) add(rep, "|h_top - known flow entropy|", std::fabs(top - known), c.checks.flow_tolerance);
  if (entry.expected == "expected-zero") {
    add(rep, "|h|", std::fabs(est.h), c.checks.zero_tolerance);
    add(rep, "|h_top|", std::fabs(top), c.checks.zero_tolerance);
  }
}

void poisson(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& s = require_zoo(c, "poisson");
  if (s.name != "poisson-pi-x" || s.children.size() != 1)
    throw ConfigError("structure.zoo", "poisson needs poisson-pi-x with an inner field");
  auto est = estimate_entropy(*g, c.entropy);
  rep.notes.push_back("h=" + format_number(est.h) + " at eps=" + format_number(est.headline_epsilon));
  const auto& inner = s.children[0];
  if (zoo_entry(inner.name).expected == "expected-zero") {
    add(rep, "h", est.h, c.checks.zero_tolerance);
    return;
  }
  double top = flow_entropy(inner, spec_manifold(inner), c, rep, "inner flow");
  double want = 2.0 * top;
  if (!(want > 0.0)) {
    add(rep, "2 h_top of the inner field", want, -c.checks.zero_tolerance);
    return;
  }
  add(rep, "|h - 2 h_top| / (2 h_top)", std::fabs(est.h - want) / want, c.checks.poisson_tolerance);
}

void lemma_bound(CheckReport& rep, const ExperimentConfig& c, const StructurePtr& g) {
  const auto& o = c.entropy;
  std::size_t n = g->manifold().size();
  std::vector<double> rho = c.checks.rho_grid.empty() ? o.r_grid : c.checks.rho_grid;
  double K = lemma_constant(*g, o.steps, rho, o.matrix.moves);
  rep.notes.push_back("K=" + format_number(K));
  auto leaves = leaf_partition(*g, std::max(o.r_grid.back(), o.matrix.leaf_probe_r), o.steps, o.matrix.moves);

  // speed[x * n + y]: smallest grid speed connecting x to y in T steps.
  std::vector<double> speed(n * n, std::numeric_limits<double>::infinity());
  std::vector<char> cur(n), next(n);
  for (double p : rho) {
    auto moves = build_move_graph(*g, p, o.steps, o.matrix.moves);
    for (PointId x = 0; x < n; ++x) {
      std::fill(cur.begin(), cur.end(), 0);
      cur[x] = 1;
      for (std::size_t k = 0; k < o.steps; ++k) {
        std::fill(next.begin(), next.end(), 0);
        for (PointId q = 0; q < n; ++q)
          if (cur[q])
            for (PointId s : moves.successors(q)) next[s] = 1;
        cur.swap(next);
      }
      for (PointId y = 0; y < n; ++y)
        if (cur[y] && !std::isfinite(speed[x * n + y])) speed[x * n + y] = p;
    }
  }
  std::vector<double> sup(n * n, 0.0);
  for (double r : o.r_grid) {
    auto d = d_r_matrix(*g, r, o.steps, o.mode, uncut(o));
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = std::max(sup[i], d.values()[i]);
  }
  double worst = 0.0;
  std::size_t pairs = 0, unreached = 0;
  for (PointId x = 0; x < n; ++x)
    for (PointId y = 0; y < n; ++y) {
      if (x == y || !leaves.same_leaf(x, y)) continue;
      double p = speed[x * n + y];
      if (!std::isfinite(p)) {
        ++unreached;
        continue;
      }
      ++pairs;
      worst = std::max(worst, sup[x * n + y] - 2.0 * K * p);
    }
  rep.notes.push_back(std::to_string(pairs) + " same-leaf pairs checked, " + std::to_string(unreached) +
                      " not connected at any grid speed");
  add(rep, "max over same-leaf pairs of sup_r d_r - 2 K rho", worst, 1e-12 * std::max(1.0, largest(sup)));
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](auto& a) { return a.passed; });
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> suites{"metric-axioms", "homogeneity", "additivity", "zero-entropy",
                                               "vector-theorem", "poisson", "lemma-bound"};
  return suites;
}

CheckReport run_check(std::string_view suite, const ExperimentConfig& config) {
  CheckReport rep;
  rep.suite = std::string(suite);
  auto t0 = std::chrono::steady_clock::now();
  using Suite = void (*)(CheckReport&, const ExperimentConfig&, const StructurePtr&);
  Suite run = nullptr;
  if (suite == "metric-axioms") run = metric_axioms;
  else if (suite == "homogeneity") run = homogeneity;
  else if (suite == "additivity") run = additivity;
  else if (suite == "zero-entropy") run = zero_entropy;
  else if (suite == "vector-theorem") run = vector_theorem;
  else if (suite == "poisson") run = poisson;
  else if (suite == "lemma-bound") run = lemma_bound;
  else throw ConfigError("suite", "unknown check suite '" + std::string(suite) + "'");
  if (suite == "additivity" && config.structure.kind != StructureSpec::Kind::direct_sum)
    throw ConfigError("structure", "additivity needs a direct_sum structure");
  auto g = build_structure(config.structure);
  rep.structure = g->name();
  run(rep, config, g);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string check_report_json(const CheckReport& rep) {
  nlohmann::ordered_json j;
  j["suite"] = rep.suite;
  j["structure"] = rep.structure;
  j["passed"] = rep.passed();
  auto arr = nlohmann::ordered_json::array();
  for (auto& a : rep.assertions)
    arr.push_back({{"name", a.name}, {"passed", a.passed}, {"measured", a.measured}, {"bound", a.bound}});
  j["assertions"] = arr;
  j["notes"] = rep.notes;
  return j.dump(2) + "\n";
}

}  // namespace geoentropy
