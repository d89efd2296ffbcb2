#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "geoentropy/config.hpp"
#include "geoentropy/error.hpp"
#include "geoentropy/report.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace geoentropy;

namespace {

const char* kValid = R"({
  "structure": {"zoo": "rotation-circle", "manifold": {"kind": "circle", "points": 8}},
  "r_grid": [0.5, 1, 2],
  "epsilon_grid": [0.1, 0.2],
  "steps": 3,
  "solver": {"mode": "beam", "width": 4, "seed": 9},
  "outputs": {"dir": "out", "prefix": "rot"}
})";

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kValid;
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("valid config") {
  auto c = parse_config(kValid);
  CHECK(c.structure.name == "rotation-circle");
  CHECK(c.structure.manifold.points == 8);
  CHECK(c.entropy.r_grid == std::vector<double>{0.5, 1, 2});
  CHECK(c.entropy.steps == 3);
  CHECK(c.entropy.mode.is_beam());
  CHECK(c.entropy.mode.width == 4);
  CHECK(c.entropy.mode.seed == 9);
  CHECK(c.outputs.prefix == "rot");
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of(with("[0.5, 1, 2]", "[1, 0.5, 2]")) == "r_grid");
  CHECK(field_of(with("[0.5, 1, 2]", "[0.5, 1]")) == "r_grid");
  CHECK(field_of(with("[0.1, 0.2]", "[]")) == "epsilon_grid");
  CHECK(field_of(with("\"width\": 4, ", "")) == "solver.width");
  CHECK(field_of(with("\"width\": 4", "\"width\": 0")) == "solver.width");
  CHECK(field_of(with("rotation-circle", "no-such-thing")) == "structure.zoo");
  CHECK(field_of(with("\"steps\": 3", "\"stepz\": 3")) == "stepz");
  CHECK(field_of(with("\"kind\": \"circle\"", "\"kind\": \"klein\"")) == "structure.manifold.kind");
  CHECK(field_of("[1, 2]") == "config");
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
}

TEST_CASE("config files get line-anchored messages") {
  auto path = std::filesystem::temp_directory_path() / "geoentropy_bad_config.json";
  {
    std::ofstream out(path);
    out << with("[0.5, 1, 2]", "[2, 1, 0.5]");
  }
  try {
    load_config(path.string());
    FAIL("descending grid accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "r_grid");
    std::string msg = e.what();
    CHECK(msg.find(path.string() + ":3:") == 0);
    CHECK(msg.find("r_grid") != std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("solver mode strings") {
  CHECK_FALSE(parse_mode("exhaustive", 0).is_beam());
  auto b = parse_mode("beam:16", 3);
  CHECK(b.is_beam());
  CHECK(b.width == 16);
  CHECK(b.seed == 3);
  CHECK_THROWS_AS(parse_mode("beam:0", 0), ConfigError);
  CHECK_THROWS_AS(parse_mode("beam", 0), ConfigError);
  CHECK_THROWS_AS(parse_mode("greedy", 0), ConfigError);
}

TEST_CASE("point predicates") {
  auto m = build_torus(4, 2);
  PointPredicate ball;
  ball.kind = PointPredicate::Kind::ball;
  ball.center = {0.0, 0.0};
  ball.radius = 0.3;
  auto in = select_points(*m, ball);
  CHECK(in.size() == 5);  // the center and its four axis neighbours at 1/4
  PointPredicate box;
  box.kind = PointPredicate::Kind::box;
  box.lo = {0.0, 0.0};
  box.hi = {0.5, 0.25};
  CHECK(select_points(*m, box).size() == 6);
  CHECK(select_points(*m, PointPredicate{}).size() == 16);
}

TEST_CASE("numbers print as shortest round-trip decimals") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("counts CSV") {
  std::vector<SeparatedCount> counts{{0.5, 0.1, 4, CountMethod::greedy}, {1.0, 0.1, 1, CountMethod::exact}};
  std::ostringstream out;
  write_counts_csv(out, counts);
  CHECK(out.str() == "r,epsilon,N,method,ln_N_over_r\n0.5,0.1,4,greedy,2.772588722239781\n1,0.1,1,exact,0\n");
}

TEST_CASE("matrix CSV and JSON summary") {
  auto g = oracle::build("zero-field", oracle::circle(3));
  auto d = d_r_matrix(*g, 1.0, 2, SolveMode::exhaustive());
  std::ostringstream out;
  write_matrix_csv(out, d);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# kind=d_r r=1 T=2 mode=exhaustive seed=0 cutoff=inf exact=3 lower_bound=0 capped=0");
  std::getline(in, line);
  CHECK(line == "id,0,1,2");
  std::getline(in, line);
  const auto& m = g->manifold();
  CHECK(line == "0,0," + format_number(2 * m.distance(0, 1)) + "," + format_number(2 * m.distance(0, 2)));

  EntropyOptions o;
  o.r_grid = {1, 2, 3};
  o.epsilon_grid = {0.2, 0.5};
  o.compute_D = true;
  auto est = estimate_entropy(*g, o);
  auto text = summary_json(est, {g->name(), o.r_grid, o.epsilon_grid, o.steps, o.mode, o.method});
  CHECK(text == summary_json(est, {g->name(), o.r_grid, o.epsilon_grid, o.steps, o.mode, o.method}));
  auto j = nlohmann::json::parse(text);
  CHECK(j["structure"] == "zero-field");
  CHECK(j["h"] == 0.0);
  CHECK(j["H"] == 0.0);
  CHECK(j["slopes"].size() == 2);
  CHECK(j["slopes"][0].contains("saturated"));
  CHECK(j["diagnostics"]["points"] == 3);
  CHECK(j["diagnostics"]["all_exact"] == true);
  CHECK(j["solver"]["mode"] == "exhaustive");
}
