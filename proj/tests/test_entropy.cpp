#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "geoentropy/entropy.hpp"
#include "geoentropy/error.hpp"
#include "oracles.hpp"

using namespace geoentropy;

namespace {

std::vector<SeparatedCount> series(const std::vector<double>& r, const std::vector<double>& n) {
  std::vector<SeparatedCount> out;
  for (std::size_t i = 0; i < r.size(); ++i)
    out.push_back({r[i], 0.1, static_cast<std::size_t>(n[i]), CountMethod::greedy});
  return out;
}

EntropyOptions options(std::vector<double> r, std::vector<double> eps, std::size_t T) {
  EntropyOptions o;
  o.r_grid = std::move(r);
  o.epsilon_grid = std::move(eps);
  o.steps = T;
  return o;
}

// Largest eigenvalue of [[2,1],[1,1]] from its characteristic polynomial.
double cat_eigenvalue() {
  double tr = 3.0, det = 1.0;
  return (tr + std::sqrt(tr * tr - 4.0 * det)) / 2.0;
}

}  // namespace

TEST_CASE("separated counts on tiny metrics") {
  std::vector<double> unit(16, 1.0);
  for (int i = 0; i < 4; ++i) unit[i * 5] = 0.0;
  CHECK(max_separated(unit, 4, 0.5, CountMethod::greedy) == 4);
  CHECK(max_separated(unit, 4, 0.5, CountMethod::exact) == 4);

  std::vector<double> arc(64);
  for (long i = 0; i < 8; ++i)
    for (long j = 0; j < 8; ++j) arc[i * 8 + j] = oracle::arc(i, j, 8);
  double eps = 3.0 / 8 + 1e-9;
  CHECK(oracle::separated(arc, 8, eps) == 2);
  CHECK(max_separated(arc, 8, eps, CountMethod::exact) == 2);
  CHECK(max_separated(arc, 8, 0.25, CountMethod::exact) == oracle::separated(arc, 8, 0.25));
  CHECK_THROWS_AS(max_separated(arc, 8, 0.0, CountMethod::greedy), InvalidArgument);
  CHECK_THROWS_AS(max_separated(arc, 7, 0.1, CountMethod::greedy), InvalidArgument);
}

TEST_CASE("exact count matches subset search; packing sandwich") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::size_t> size(3, 14);
  std::uniform_real_distribution<double> eps(0.05, 0.6);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = size(rng);
    auto d = oracle::random_metric(n, rng);
    double e = eps(rng);
    auto exact = max_separated(d, n, e, CountMethod::exact);
    CHECK(exact == oracle::separated(d, n, e));
    auto greedy = max_separated(d, n, e, CountMethod::greedy);
    CHECK(greedy <= exact);
    CHECK(max_separated(d, n, 2 * e, CountMethod::exact) <= greedy);
    CHECK(max_separated(d, n, 1.5 * e, CountMethod::exact) <= exact);
  }
}

TEST_CASE("exact count refuses oversized components") {
  std::size_t n = kExactComponentLimit + 1;
  std::vector<double> d(n * n, 0.01);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  CHECK_THROWS_AS(max_separated(d, n, 0.5, CountMethod::exact), BudgetExceeded);
  CHECK(max_separated(d, n, 0.5, CountMethod::greedy) == 1);
}

TEST_CASE("slope fits") {
  auto flat = entropy_from_counts(series({1, 2, 3, 4}, {7, 7, 7, 7}));
  CHECK(flat.slope == 0.0);
  CHECK(flat.residual == doctest::Approx(0.0));

  std::vector<double> r{1, 2, 3, 4, 5}, n;
  for (double x : r) n.push_back(std::round(std::exp(2 * x)));
  auto grow = entropy_from_counts(series(r, n));
  CHECK(std::fabs(grow.slope - 2.0) < 0.05);
  CHECK(grow.points == 3);
  CHECK(grow.r_first == 3.0);
  CHECK(grow.r_last == 5.0);

  auto shrink = entropy_from_counts(series({1, 2, 3}, {9, 5, 2}));
  CHECK(shrink.slope == 0.0);
  CHECK(shrink.raw_slope < 0.0);

  // Polynomial growth: the slope decays as the window moves right.
  std::vector<double> rr, nn;
  for (int i = 1; i <= 40; ++i) {
    rr.push_back(i);
    nn.push_back(5.0 * i);
  }
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t end : {3u, 10u, 20u, 40u}) {
    std::vector<double> a(rr.begin(), rr.begin() + end), b(nn.begin(), nn.begin() + end);
    auto fit = entropy_from_counts(series(a, b), 3);
    CHECK(fit.slope < previous);
    previous = fit.slope;
  }
  CHECK(previous < 0.03);

  CHECK_THROWS_AS(entropy_from_counts(series({1, 2}, {1, 2})), InvalidArgument);
  CHECK_THROWS_AS(entropy_from_counts(series({1, 1, 2}, {1, 2, 3})), InvalidArgument);
  CHECK_THROWS_AS(entropy_from_counts(series({1, 2, 3}, {1, 0, 3})), InvalidArgument);
}

TEST_CASE("saturation-aware fits") {
  // Counts above 10 are dropped; the leading three carry the fit.
  auto fit = entropy_from_counts(series({1, 2, 3, 4, 5, 6}, {1, 2, 4, 30, 30, 30}), 0, 10);
  CHECK_FALSE(fit.saturated);
  CHECK(fit.r_last == 3.0);
  CHECK(fit.slope == doctest::Approx(std::log(2.0)));
  auto sat = entropy_from_counts(series({1, 2, 3, 4}, {20, 30, 30, 30}), 0, 10);
  CHECK(sat.saturated);
  CHECK(sat.points == 3);

  std::vector<SlopeFit> profile(4);
  for (std::size_t i = 0; i < 4; ++i) profile[i].epsilon = 0.1 * (i + 1);
  profile[0].slope = 5.0;
  profile[1].slope = 1.0;
  profile[2].slope = 2.0;
  profile[3].slope = 0.5;
  CHECK(headline_index(profile, 0.15) == 2);
  profile[2].saturated = true;
  CHECK(headline_index(profile, 0.15) == 1);
  for (auto& p : profile) p.saturated = true;
  CHECK(headline_index(profile, 0.15) == 1);
  CHECK(headline_index(profile, 1.0) == 3);
}

TEST_CASE("zero entropy examples") {
  auto riem = oracle::build("riemannian-torus", oracle::torus(8, 1));
  auto est = estimate_entropy(*riem, options({0.5, 1, 1.5, 2}, {0.2, 0.3, 0.5}, 3));
  CHECK(est.h == 0.0);
  for (auto& f : est.profile) CHECK(f.slope < 1e-12);
  auto zero = oracle::build("zero-field", oracle::torus(4, 2));
  est = estimate_entropy(*zero, options({1, 2, 3}, {0.1, 0.3}, 2));
  CHECK(est.h == 0.0);
  CHECK(est.diagnostics.all_exact);
  CHECK(est.counts.size() == 6);
  CHECK(est.diagnostics.points == 16);
}

TEST_CASE("exact counts are monotone in r and epsilon") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    auto g = oracle::random_field(rng);
    auto o = options({0.5, 1, 1.5, 2}, {0.1, 0.2, 0.3, 0.45}, 3);
    o.method = CountMethod::exact;
    auto est = estimate_entropy(*g, o);
    REQUIRE(est.diagnostics.all_exact);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t e = 0; e < 4; ++e) {
        auto c = est.counts[i * 4 + e].count;
        if (i > 0) CHECK(c >= est.counts[(i - 1) * 4 + e].count);
        if (e > 0) CHECK(c <= est.counts[i * 4 + e - 1].count);
      }
  }
}

TEST_CASE("homogeneity end to end") {
  VectorField f(16);
  auto m = build_torus(4, 2);
  for (PointId p = 0; p < 16; ++p) f[p] = {1.0, m->coords(p)[0] < 0.5 ? 0.5 : -0.25};
  auto field = from_vector_field(m, f);
  std::vector<double> r{0.5, 1, 1.5, 2}, eps{0.2, 0.4, 0.6};
  auto base = estimate_entropy(*field, options(r, eps, 3));
  for (double gamma : {2.0, 5.0}) {
    std::vector<double> gr;
    for (double x : r) gr.push_back(gamma * x);
    auto scaled = estimate_entropy(*scale_norm(field, gamma), options(gr, eps, 3));
    REQUIRE(scaled.counts.size() == base.counts.size());
    for (std::size_t i = 0; i < base.counts.size(); ++i) CHECK(scaled.counts[i].count == base.counts[i].count);
    for (std::size_t e = 0; e < eps.size(); ++e)
      CHECK(base.profile[e].raw_slope == doctest::Approx(gamma * scaled.profile[e].raw_slope).epsilon(1e-12));
  }
}

TEST_CASE("H does not exceed h") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 6; ++trial) {
    auto g = oracle::random_field(rng);
    auto o = options({0.5, 1, 1.5, 2}, {0.15, 0.3}, 2);
    o.compute_D = true;
    auto est = estimate_entropy(*g, o);
    REQUIRE(est.H);
    CHECK(*est.H <= est.h + est.profile.front().residual + est.profile.back().residual + 1e-12);
    CHECK(est.diagnostics.D_above_d == 0);
    for (std::size_t i = 0; i < est.counts.size(); ++i) CHECK(est.counts_D[i].count <= est.counts[i].count);
  }
}

TEST_CASE("local entropy with vacuous confinement equals the global estimate") {
  auto g = oracle::build("riemannian-torus", oracle::torus(4, 2));
  std::vector<PointId> all(16);
  for (PointId p = 0; p < 16; ++p) all[p] = p;
  auto o = options({0.5, 1, 1.5}, {0.2, 0.4}, 2);
  auto global = estimate_entropy(*g, o);
  auto local = local_entropy(*g, all, all, all, o);
  CHECK(local.local);
  for (std::size_t i = 0; i < global.counts.size(); ++i) CHECK(local.counts[i].count == global.counts[i].count);
  CHECK(local.h == global.h);
}

TEST_CASE("Bowen-Dinaburg estimates") {
  FlowOptions o;
  o.r_grid = {1, 2, 3, 4};
  o.epsilon_grid = {0.15, 0.25, 0.4};
  auto t = build_torus(8, 2);
  auto linear = bowen_dinaburg(*t, zoo_vector_field("linear-torus-flow", *t), o);
  CHECK(std::fabs(linear.h_top) < 0.05);
  auto idle = bowen_dinaburg(*t, zoo_vector_field("zero-field", *t), o);
  CHECK(idle.h_top == 0.0);

  auto mt = build_mapping_torus(12, 8);
  FlowOptions c;
  c.r_grid = {0.5, 1, 1.5, 2};
  c.epsilon_grid = {0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  c.time_step = 0.125;
  auto cat = bowen_dinaburg(*mt, zoo_vector_field("catmap-suspension", *mt), c);
  CHECK(cat.max_snap_error < 1e-12);
  CHECK(std::fabs(cat.h_top - std::log(cat_eigenvalue())) < 0.25);
}

TEST_CASE("flow map follows the field") {
  auto c = build_circle(8);
  auto phi = flow_map(*c, VectorField(8, Coords{1.0}), 0.125, -1.0);
  for (PointId p = 0; p < 8; ++p) {
    long i = std::lround(c->coords(p)[0] * 8);
    CHECK(std::lround(c->coords(phi[p])[0] * 8) == (i + 1) % 8);
  }
}

TEST_CASE("Lemma constant") {
  auto zero = oracle::build("zero-field", oracle::circle(8));
  std::vector<double> rho{0.5, 1, 2, 4};
  CHECK(lemma_constant(*zero, 3, rho) == 0.0);

  auto rot = oracle::build("rotation-circle", oracle::circle(8));
  double want = 0.0;
  for (double p : rho) {
    auto mg = build_move_graph(*rot, p, 4);
    for (PointId x = 0; x < 8; ++x)
      for (auto& w : oracle::walks(mg, x)) want = std::max(want, rot->manifold().distance(w.back(), w.front()) / p);
  }
  CHECK(lemma_constant(*rot, 4, rho) == want);
  CHECK(want == 1.0);

  auto riem = oracle::build("riemannian-torus", oracle::torus(8, 1));
  std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  for (PointId y = 0; y < 8; ++y) {
    std::optional<double> first;
    for (double p : grid) {
      auto mg = build_move_graph(*riem, p, 2);
      bool hit = false;
      for (auto& w : oracle::walks(mg, 0)) hit = hit || w.back() == y;
      if (hit) {
        first = p;
        break;
      }
    }
    CHECK(reach_speed(*riem, 0, y, 2, grid) == first);
  }
}
