#include <algorithm>

#include "doctest.h"
#include "geoentropy/checks.hpp"
#include "geoentropy/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace geoentropy;

namespace {

ExperimentConfig config_for(const StructureSpec& s, std::vector<double> r, std::vector<double> eps, std::size_t T) {
  ExperimentConfig c;
  c.structure = s;
  c.entropy.r_grid = std::move(r);
  c.entropy.epsilon_grid = std::move(eps);
  c.entropy.steps = T;
  return c;
}

bool mentions(const CheckReport& rep, const std::string& text) {
  return std::any_of(rep.assertions.begin(), rep.assertions.end(),
                     [&](const CheckAssertion& a) { return a.name.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("suite names") {
  const auto& names = check_suites();
  for (const char* s : {"metric-axioms", "homogeneity", "additivity", "zero-entropy", "vector-theorem", "poisson",
                        "lemma-bound"})
    CHECK(std::find(names.begin(), names.end(), s) != names.end());
  auto c = config_for(oracle::zoo("zero-field", oracle::circle(6)), {1, 2, 3}, {0.2}, 2);
  CHECK_THROWS_AS(run_check("no-such-suite", c), ConfigError);
  CHECK_THROWS_AS(run_check("additivity", c), ConfigError);
  CHECK_THROWS_AS(run_check("poisson", c), ConfigError);
}

TEST_CASE("metric axioms on circle(6)") {
  for (const char* name : {"zero-field", "rotation-circle", "riemannian-torus"}) {
    auto c = config_for(oracle::zoo(name, oracle::circle(6)), {0.5, 1, 1.5, 2}, {0.2, 0.4}, 4);
    auto rep = run_check("metric-axioms", c);
    CHECK_MESSAGE(rep.passed(), name);
    CHECK(rep.structure == name);
    CHECK(mentions(rep, "triangle"));
    CHECK(mentions(rep, "monotone"));
  }
}

TEST_CASE("homogeneity with gamma = 3") {
  auto c = config_for(oracle::zoo("rotation-circle", oracle::circle(6)), {0.5, 1, 1.5}, {0.2, 0.4}, 3);
  c.checks.gammas = {3.0};
  auto rep = run_check("homogeneity", c);
  CHECK(rep.passed());
  CHECK(mentions(rep, "gamma=3"));
  auto j = nlohmann::json::parse(check_report_json(rep));
  CHECK(j["suite"] == "homogeneity");
  CHECK(j["passed"] == true);
  CHECK(j["assertions"].size() == rep.assertions.size());
  CHECK_FALSE(j.contains("seconds"));
}

TEST_CASE("zero entropy passes on a flat torus and fails on the cat map") {
  auto flat = config_for(oracle::zoo("riemannian-torus", oracle::torus(6, 2)), {0.5, 1, 1.5, 2}, {0.2, 0.4}, 2);
  CHECK(run_check("zero-entropy", flat).passed());
  auto cat = config_for(oracle::zoo("catmap-suspension", oracle::mapping_torus(6, 4)), {0.5, 1, 1.5, 2},
                        {0.2, 0.3}, 2);
  cat.entropy.mode = SolveMode::beam(2, 1);
  CHECK_FALSE(run_check("zero-entropy", cat).passed());
}

TEST_CASE("additivity factorizes exactly on two circles") {
  StructureSpec sum;
  sum.kind = StructureSpec::Kind::direct_sum;
  sum.children = {oracle::zoo("rotation-circle", oracle::circle(4)),
                  oracle::zoo("riemannian-torus", oracle::circle(4))};
  auto c = config_for(sum, {0.75, 1.5, 2.25, 3}, {0.2, 0.4}, 3);
  auto rep = run_check("additivity", c);
  CHECK(rep.passed());
  for (auto& a : rep.assertions)
    if (a.name.find("max(delta_1, delta_2)") != std::string::npos) CHECK(a.measured == 0.0);
}

TEST_CASE("lemma bound on rotation-circle") {
  auto c = config_for(oracle::zoo("rotation-circle", oracle::circle(8)), {0.5, 1, 1.5, 2}, {0.2}, 4);
  c.checks.rho_grid = {0.5, 1, 2, 4};
  CHECK(run_check("lemma-bound", c).passed());
}
