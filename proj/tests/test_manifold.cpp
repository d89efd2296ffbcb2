#include <cmath>
#include <numbers>

#include "doctest.h"
#include "geoentropy/error.hpp"
#include "geoentropy/manifold.hpp"
#include "oracles.hpp"

using namespace geoentropy;

namespace {

PointId at(const SampledManifold& m, std::initializer_list<double> c) {
  std::vector<double> v(c);
  auto [id, dist] = m.snap_with_distance(v);
  REQUIRE(dist < 1e-12);
  return id;
}

}  // namespace

TEST_CASE("circle samples and wraparound distance") {
  auto m = build_torus(4, 1);
  CHECK(m->size() == 4);
  CHECK(m->distance(at(*m, {0.0}), at(*m, {0.5})) == doctest::Approx(0.5));
  CHECK(m->distance(at(*m, {0.0}), at(*m, {0.75})) == doctest::Approx(0.25));
  CHECK(build_circle(8)->mesh_scale() == doctest::Approx(1.0 / 8));
}

TEST_CASE("circle(8) metric equals the arc length") {
  auto m = build_circle(8);
  for (PointId i = 0; i < 8; ++i)
    for (PointId j = 0; j < 8; ++j) {
      long a = std::lround(m->coords(i)[0] * 8), b = std::lround(m->coords(j)[0] * 8);
      CHECK(m->distance(i, j) == doctest::Approx(oracle::arc(a, b, 8)));
    }
}

TEST_CASE("flat 2-torus combines axes in the Euclidean norm") {
  auto m = build_torus(2, 2);
  CHECK(m->size() == 4);
  CHECK(m->distance(at(*m, {0.0, 0.0}), at(*m, {0.5, 0.5})) == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("icosahedral sphere") {
  auto s0 = build_sphere(0);
  CHECK(s0->size() == 12);
  std::size_t antipodal = 0;
  for (PointId i = 0; i < 12; ++i)
    for (PointId j = 0; j < 12; ++j)
      if (std::fabs(s0->distance(i, j) - std::numbers::pi) < 1e-9) ++antipodal;
  CHECK(antipodal == 12);
  CHECK(build_sphere(1)->size() == 42);
  auto s2 = build_sphere(2);
  CHECK(check_metric(s2->metric(), s2->size()).ok());
}

TEST_CASE("max-metric product") {
  auto m1 = build_circle(4), m2 = build_circle(3);
  auto p = product(m1, m2);
  CHECK(p->size() == 12);
  for (PointId a = 0; a < 4; ++a)
    for (PointId b = 0; b < 3; ++b)
      for (PointId c = 0; c < 4; ++c)
        for (PointId e = 0; e < 3; ++e)
          CHECK(p->distance(product_id(*m2, a, b), product_id(*m2, c, e)) ==
                std::max(m1->distance(a, c), m2->distance(b, e)));
  auto rep = check_metric(p->metric(), p->size());
  CHECK(rep.ok());
  CHECK(rep.triples_checked == 12u * 12u * 12u);
  CHECK_THROWS_AS(product(build_circle(200), build_circle(200)), BudgetExceeded);
}

TEST_CASE("snapping") {
  auto m = build_torus(4, 1);
  std::vector<double> c{0.26};
  CHECK(m->coords(m->snap(c))[0] == doctest::Approx(0.25));
  c = {0.125};
  CHECK(m->snap(c) == at(*m, {0.0}));
  c = {0.99};
  CHECK(m->snap(c) == at(*m, {0.0}));
  for (PointId i = 0; i < m->size(); ++i) CHECK(m->snap(m->coords(i)) == i);
}

TEST_CASE("check_metric flags violations") {
  std::vector<double> d{0, 1, 5, 1, 0, 1, 5, 1, 0};
  auto rep = check_metric(d, 3);
  CHECK_FALSE(rep.triangle);
  CHECK(rep.worst_triangle_excess == doctest::Approx(3.0));
  d = {0, 1, 2, 1.5, 0, 1, 2, 1, 0};
  CHECK_FALSE(check_metric(d, 3).symmetric);
  d = {0, 0, 1, 0, 0, 1, 1, 1, 0};
  CHECK_FALSE(check_metric(d, 3).positive);
}

TEST_CASE("mapping torus of the cat map") {
  const std::size_t n = 6, L = 4;
  auto m = build_mapping_torus(n, L);
  REQUIRE(m->size() == n * n * L);
  CHECK(check_metric(m->metric(), m->size()).ok());
  auto id = [&](long i, long j, long k) {
    return at(*m, {static_cast<double>((i % 6 + 6) % 6) / n, static_cast<double>((j % 6 + 6) % 6) / n,
                   static_cast<double>(k) / L});
  };
  // p -> -p commutes with the monodromy and preserves the Sol lengths.
  for (long k = 0; k < 4; ++k)
    for (long i = 0; i < 6; ++i)
      for (long j = 0; j < 6; ++j) {
        CHECK(m->distance(id(i, j, k), id(1, 2, 0)) == doctest::Approx(m->distance(id(-i, -j, k), id(-1, -2, 0))));
        if (k + 1 < 4) CHECK(m->distance(id(i, j, k), id(i, j, k + 1)) <= 1.0 / L + 1e-15);
      }
  // (p, 1) is glued to (A p, 0).
  CHECK(m->distance(id(1, 2, 3), id(2 * 1 + 2, 1 + 2, 0)) <= 1.0 / L + 1e-15);
  CHECK_THROWS_AS(build_mapping_torus(6, 4, {1, 1, 0, 1}), InvalidArgument);
}

TEST_CASE("point budget") {
  CHECK_THROWS_AS(build_torus(101, 2), BudgetExceeded);
}
