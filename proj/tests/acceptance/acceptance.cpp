// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number; GEOENTROPY_CONFIGS overrides the config directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "geoentropy/checks.hpp"
#include "geoentropy/config.hpp"
#include "geoentropy/report.hpp"

using namespace geoentropy;

namespace {

std::string config_dir() {
  if (const char* env = std::getenv("GEOENTROPY_CONFIGS")) return env;
  return GEOENTROPY_CONFIG_DIR;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const CheckAssertion* find(const CheckReport& rep, const std::string& text) {
  for (auto& a : rep.assertions)
    if (a.name.find(text) != std::string::npos) return &a;
  return nullptr;
}

ExperimentConfig small_config(const std::string& zoo, const ManifoldSpec& m) {
  ExperimentConfig c;
  c.structure = oracle::zoo(zoo, m);
  c.entropy.r_grid = {0.5, 1, 1.5, 2};
  c.entropy.epsilon_grid = {0.2, 0.4};
  c.entropy.steps = 4;
  return c;
}

// Zoo instances of criteria 1 and 2. rotation-circle is defined on circles only.
std::vector<std::pair<std::string, ManifoldSpec>> desk_instances() {
  return {{"zero-field", oracle::circle(8)},      {"rotation-circle", oracle::circle(8)},
          {"riemannian-torus", oracle::circle(8)}, {"zero-field", oracle::torus(4, 2)},
          {"riemannian-torus", oracle::torus(4, 2)}};
}

void suite_on(Outcome& out, const std::string& suite, const std::string& file) {
  auto c = load_config(config_dir() + "/" + file);
  auto rep = run_check(suite, c);
  for (auto& a : rep.assertions)
    if (!a.passed) out.require(false, file + ": " + a.name + " = " + num(a.measured) + " > " + num(a.bound));
  out.detail << file << " ok=" << rep.passed() << "; ";
}

double measured(const std::string& suite, const std::string& file, const std::string& text, Outcome& out) {
  auto c = load_config(config_dir() + "/" + file);
  auto rep = run_check(suite, c);
  for (auto& a : rep.assertions)
    if (!a.passed) out.require(false, file + ": " + a.name + " = " + num(a.measured) + " > " + num(a.bound));
  auto* a = find(rep, text);
  out.require(a != nullptr, file + ": no assertion '" + text + "'");
  return a ? a->measured : NAN;
}

void metric_axioms(Outcome& out) {
  for (auto& [zoo, m] : desk_instances()) {
    auto c = small_config(zoo, m);
    auto rep = run_check("metric-axioms", c);
    out.require(rep.passed(), zoo + " on " + m.kind);
    for (auto& a : rep.assertions)
      if (a.name.find("triangle") != std::string::npos && a.name.find("sampled") != std::string::npos)
        out.require(false, "triangle inequality was sampled on " + zoo);
  }
  out.detail << desk_instances().size() << " instances, T=4, r grid {0.5,1,1.5,2}, exhaustive";
}

void homogeneity(Outcome& out) {
  for (auto& [zoo, m] : desk_instances()) {
    auto c = small_config(zoo, m);
    c.checks.gammas = {2.0, 5.0};
    out.require(run_check("homogeneity", c).passed(), zoo + " on " + m.kind);
  }
  out.detail << "gamma in {2,5} on " << desk_instances().size() << " instances";
}

void zero_entropy(Outcome& out) {
  for (const char* f : {"zero-riemannian.json", "zero-contact.json", "zero-sphere-shell.json"})
    suite_on(out, "zero-entropy", f);
}

void vector_theorem(Outcome& out) {
  double lin = measured("vector-theorem", "linear-torus-flow.json", "|h|", out);
  out.detail << "linear |h|=" << num(lin) << "; ";
  double gap = measured("vector-theorem", "catmap-suspension.json", "|h - 2 h_top|", out);
  double top = measured("vector-theorem", "catmap-suspension.json", "known flow entropy", out);
  out.detail << "catmap |h-2h_top|=" << num(gap) << " |h_top-ln lambda|=" << num(top);
}

void additivity(Outcome& out) {
  auto c = load_config(config_dir() + "/additivity-circles.json");
  out.require(!c.entropy.mode.is_beam() && c.entropy.steps <= 3, "circle factorization must be exhaustive, T <= 3");
  auto rep = run_check("additivity", c);
  std::size_t pairs = 0;
  for (auto& a : rep.assertions)
    if (a.name.find("max(delta_1, delta_2)") != std::string::npos) {
      ++pairs;
      out.require(a.measured == 0.0, "factorization " + a.name);
    }
  out.require(pairs > 0, "no pairwise factorization assertions");
  out.require(rep.passed(), "additivity-circles.json");
  double rel = measured("additivity", "additivity-catmap.json", "(h_1 + h_2)", out);
  out.detail << "factorization exact at " << pairs << " radii; catmap+zero relative gap=" << num(rel);
}

void poisson(Outcome& out) {
  double lin = measured("poisson", "poisson-linear.json", "h", out);
  double rel = measured("poisson", "poisson-catmap.json", "2 h_top", out);
  out.detail << "linear inner h=" << num(lin) << "; catmap inner |h-2h_top|/(2h_top)=" << num(rel);
}

void oracle_equivalence(Outcome& out) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> width(1, 4), steps(2, 3);
  std::uniform_real_distribution<double> speed(0.5, 2.0);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto g = oracle::random_field(rng);
    auto mg = build_move_graph(*g, speed(rng), static_cast<std::size_t>(steps(rng)));
    auto beam = SolveMode::beam(static_cast<std::size_t>(width(rng)), rng());
    for (PointId x = 0; x < mg.size(); ++x) {
      auto wide = SolveMode::beam(count_walks(mg, x) + 1, rng());
      for (PointId y = 0; y < mg.size(); ++y) {
        double exact = delta_r(x, y, mg, mg, SolveMode::exhaustive()).value;
        double lower = delta_r(x, y, mg, mg, beam).value;
        out.require(lower <= exact, "beam above exhaustive");
        auto full = delta_r(x, y, mg, mg, wide);
        out.require(full.value == exact && full.exactness == Exactness::exact, "wide beam differs");
        ++pairs;
      }
    }
  }
  std::uniform_int_distribution<std::size_t> size(2, 20);
  std::uniform_real_distribution<double> eps(0.05, 0.8);
  std::size_t sandwiches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = size(rng);
    auto d = oracle::random_metric(n, rng);
    for (int k = 0; k < 5; ++k) {
      double e = eps(rng);
      auto lo = max_separated(d, n, 2 * e, CountMethod::exact);
      auto greedy = max_separated(d, n, e, CountMethod::greedy);
      auto hi = max_separated(d, n, e, CountMethod::exact);
      out.require(lo <= greedy && greedy <= hi, "packing sandwich");
      ++sandwiches;
    }
  }
  out.detail << "50 instances, " << pairs << " pairs with beam <= exhaustive and wide beam = exhaustive; "
             << sandwiches << " sandwiches on 50 metrics";
}

void variant_ordering(Outcome& out) {
  ManifoldSpec shell;
  shell.kind = "shell";
  shell.level = 1;
  shell.radii = {1.0, 1.5};
  StructureSpec pois = oracle::zoo("poisson-pi-x", {});
  pois.has_manifold = false;
  pois.params["q_points"] = 3;
  pois.children = {oracle::zoo("linear-torus-flow", oracle::torus(4, 2))};
  std::vector<std::pair<StructureSpec, std::size_t>> instances{
      {oracle::zoo("zero-field", oracle::circle(8)), 3},
      {oracle::zoo("rotation-circle", oracle::circle(8)), 3},
      {oracle::zoo("linear-torus-flow", oracle::torus(6, 2)), 3},
      {oracle::zoo("riemannian-torus", oracle::torus(4, 2)), 3},
      {oracle::zoo("contact-torus3", oracle::torus(4, 3)), 2},
      {oracle::zoo("reeb-like-distribution", oracle::torus(6, 2)), 3},
      {oracle::zoo("poisson-sphere-shell", shell), 2},
      {oracle::zoo("catmap-suspension", oracle::mapping_torus(6, 4)), 2},
      {pois, 2}};
  double worst = -INFINITY;
  std::size_t compared = 0;
  for (auto& [spec, T] : instances) {
    auto g = build_structure(spec);
    EntropyOptions o;
    o.r_grid = {0.5, 1, 1.5, 2};
    o.epsilon_grid = {0.15, 0.25, 0.4};
    o.steps = T;
    o.compute_D = true;
    // Uncut matrices with the leaves the pipeline uses.
    MatrixOptions full;
    full.leaf_probe_r = o.r_grid.back();
    for (double r : o.r_grid) {
      auto d = d_r_matrix(*g, r, T, SolveMode::exhaustive(), full);
      auto D = D_r_matrix(*g, r, T, SolveMode::exhaustive(), full);
      out.require(d.all_exact() && D.all_exact(), g->name() + " is not exact");
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) out.require(D.value(i, j) <= d.value(i, j), g->name() + ": D_r > d_r");
      compared += d.size() * d.size();
    }
    auto est = estimate_entropy(*g, o);
    std::size_t hi = 0;
    for (std::size_t e = 0; e < est.profile.size(); ++e)
      if (est.profile[e].epsilon == est.headline_epsilon) hi = e;
    double slack = *est.H - est.h - est.profile[hi].residual;
    worst = std::max(worst, slack);
    out.require(slack <= 1e-12, g->name() + ": H=" + num(*est.H) + " h=" + num(est.h));
  }
  out.detail << instances.size() << " instances, " << compared << " exact entries D_r <= d_r; max(H - h - residual)="
             << num(worst);
}

void lemma_bound(Outcome& out) {
  for (const char* f : {"lemma-riemannian.json", "lemma-rotation.json"}) suite_on(out, "lemma-bound", f);
}

struct Criterion {
  int number;
  std::string title;
  double limit_seconds;  // 0: no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all{
      {1, "metric axioms", 60, metric_axioms},
      {2, "homogeneity", 60, homogeneity},
      {3, "zero-entropy theorems", 600, zero_entropy},
      {4, "vector-field theorem", 900, vector_theorem},
      {5, "additivity", 900, additivity},
      {6, "Poisson theorem", 1200, poisson},
      {7, "oracle equivalence", 120, oracle_equivalence},
      {8, "variant ordering", 0, variant_ordering},
      {9, "lemma bound", 0, lemma_bound},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  bool ok = true;
  for (auto& c : all) {
    if (!chosen.empty() && !chosen.count(c.number)) continue;
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) out.require(false, "runtime over " + num(c.limit_seconds) + " s");
    ok = ok && out.pass;
    std::printf("criterion %d %-22s %s  (%.1f s)  %s\n", c.number, c.title.c_str(), out.pass ? "PASS" : "FAIL", secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
