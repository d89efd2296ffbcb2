#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "geoentropy/checks.hpp"
#include "geoentropy/config.hpp"
#include "geoentropy/error.hpp"
#include "geoentropy/report.hpp"

namespace fs = std::filesystem;
using namespace geoentropy;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, budget = 3 };

struct Overrides {
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<std::size_t> jobs;
};

ExperimentConfig load(const std::string& path, const Overrides& ov) {
  auto c = load_config(path);
  if (!ov.output_dir.empty()) c.outputs.dir = ov.output_dir;
  if (ov.seed) c.entropy.mode.seed = *ov.seed;
  if (!ov.mode.empty()) {
    auto budget = c.entropy.mode.budget;
    c.entropy.mode = parse_mode(ov.mode, c.entropy.mode.seed);
    c.entropy.mode.budget = budget;
  }
  if (ov.jobs) c.entropy.matrix.jobs = *ov.jobs;
  return c;
}

fs::path output(const ExperimentConfig& c, const std::string& suffix) {
  fs::path dir(c.outputs.dir);
  fs::create_directories(dir);
  return dir / (c.outputs.prefix + suffix);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

template <class F>
void write_stream(const fs::path& p, F&& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  body(out);
}

RunInfo run_info(const ExperimentConfig& c, const std::string& structure) {
  const auto& o = c.entropy;
  return {structure, o.r_grid, o.epsilon_grid, o.steps, o.mode, o.method};
}

int estimate(const ExperimentConfig& c) {
  auto g = build_structure(c.structure);
  auto o = c.entropy;
  o.keep_matrices = c.outputs.matrices;
  EntropyEstimate est;
  if (c.local) {
    const auto& m = g->manifold();
    auto K = select_points(m, c.local->K);
    auto U = select_points(m, c.local->U);
    auto V = select_points(m, c.local->V);
    est = local_entropy(*g, K, U, V, o);
  } else {
    est = estimate_entropy(*g, o);
  }
  write_stream(output(c, "_counts.csv"), [&](std::ostream& out) { write_counts_csv(out, est.counts); });
  if (!est.counts_D.empty())
    write_stream(output(c, "_counts_D.csv"), [&](std::ostream& out) { write_counts_csv(out, est.counts_D); });
  write_file(output(c, "_summary.json"), summary_json(est, run_info(c, g->name())));
  for (std::size_t k = 0; k < est.matrices.size(); ++k)
    write_stream(output(c, "_d_r_" + std::to_string(k) + ".csv"),
                 [&](std::ostream& out) { write_matrix_csv(out, est.matrices[k]); });
  for (std::size_t k = 0; k < est.matrices_D.size(); ++k)
    write_stream(output(c, "_D_r_" + std::to_string(k) + ".csv"),
                 [&](std::ostream& out) { write_matrix_csv(out, est.matrices_D[k]); });
  std::cout << "structure " << g->name() << '\n';
  std::cout << "h = " << format_number(est.h) << " (epsilon " << format_number(est.headline_epsilon) << ")\n";
  if (est.H) std::cout << "H = " << format_number(*est.H) << '\n';
  if (!est.diagnostics.all_exact)
    std::cout << "note: " << est.diagnostics.lower_bound_pairs << " pair values are beam lower bounds\n";
  return ok;
}

int metric(const ExperimentConfig& c) {
  auto g = build_structure(c.structure);
  const auto& o = c.entropy;
  for (std::size_t k = 0; k < o.r_grid.size(); ++k) {
    double r = o.r_grid[k];
    auto d = d_r_matrix(*g, r, o.steps, o.mode, o.matrix);
    write_stream(output(c, "_d_r_" + std::to_string(k) + ".csv"),
                 [&](std::ostream& out) { write_matrix_csv(out, d); });
    std::cout << "d_r  r=" << format_number(r) << "  exact=" << d.count(Exactness::exact)
              << " lower_bound=" << d.count(Exactness::lower_bound) << " capped=" << d.count(Exactness::capped)
              << '\n';
    if (o.compute_D) {
      auto D = D_r_matrix(*g, r, o.steps, o.mode, o.matrix);
      write_stream(output(c, "_D_r_" + std::to_string(k) + ".csv"),
                   [&](std::ostream& out) { write_matrix_csv(out, D); });
    }
  }
  return ok;
}

int check(const std::string& suite, const ExperimentConfig& c) {
  auto rep = run_check(suite, c);
  write_file(output(c, "_check_" + suite + ".json"), check_report_json(rep));
  for (auto& a : rep.assertions)
    std::cout << (a.passed ? "PASS  " : "FAIL  ") << a.name << "  measured=" << format_number(a.measured)
              << " bound=" << format_number(a.bound) << '\n';
  for (auto& n : rep.notes) std::cout << "note: " << n << '\n';
  std::cout << suite << ": " << (rep.passed() ? "passed" : "FAILED") << '\n';
  return rep.passed() ? ok : check_failed;
}

int zoo() {
  for (auto& e : zoo_entries())
    std::cout << e.name << "  [" << e.expected << "]  " << e.summary << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy of geometric structures on sampled manifolds"};
  app.require_subcommand(1);
  Overrides ov;
  auto flags = [&](CLI::App* sub) {
    sub->add_option("--output-dir", ov.output_dir, "Directory for CSV/JSON outputs");
    sub->add_option("--seed", ov.seed, "Seed for beam tie-breaking");
    sub->add_option("--mode", ov.mode, "exhaustive or beam:<width>");
    sub->add_option("--jobs", ov.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  std::string config_path, suite;
  auto* est = app.add_subcommand("estimate", "Estimate h (and H) for a config");
  est->add_option("config", config_path)->required();
  flags(est);
  auto* chk = app.add_subcommand("check", "Run a property suite");
  chk->add_option("suite", suite)->required();
  chk->add_option("config", config_path)->required();
  flags(chk);
  auto* met = app.add_subcommand("metric", "Dump d_r (and D_r) matrices");
  met->add_option("config", config_path)->required();
  flags(met);
  app.add_subcommand("zoo", "List built-in structures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (app.got_subcommand("zoo")) return zoo();
    if (chk->parsed()) {
      const auto& names = check_suites();
      if (std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("suite", "unknown check suite '" + suite + "'");
    }
    auto c = load(config_path, ov);
    if (est->parsed()) return estimate(c);
    if (met->parsed()) return metric(c);
    return check(suite, c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return budget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  }
}
