#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "bentcert/error.hpp"
#include "bentcert/polytope.hpp"

using namespace bentcert;
using namespace bentcert::polytope;

namespace {

LinearProgram box(std::size_t n, std::vector<double> objective) {
  LinearProgram lp;
  lp.objective = std::move(objective);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    lp.constraints.push_back({e, 0.0});
    e[i] = -1.0;
    lp.constraints.push_back({e, -1.0});
  }
  return lp;
}

std::vector<std::vector<double>> points(const std::vector<Vertex>& v) {
  std::vector<std::vector<double>> out;
  for (const auto& x : v) {
    auto p = x.point;
    for (auto& c : p) c = std::round(c * 1e9) / 1e9 + 0.0;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_vertices(const LinearProgram& lp, const std::vector<Vertex>& vs) {
  for (const auto& v : vs) {
    CHECK(lp.min_slack(v.point) >= -1e-9);
    CHECK(v.active >= static_cast<int>(lp.variables()));
    CHECK(v.active_rank == static_cast<int>(lp.variables()));
    CHECK_FALSE(v.flagged);
  }
}

}  // namespace

TEST_SUITE("polytope") {
  TEST_CASE("one-dimensional LP") {
    LinearProgram lp{{1.0}, {{{-1.0}, -1.0}, {{1.0}, 0.0}}};
    const auto r = lp_maximize(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.point[0] == doctest::Approx(1.0));
  }

  TEST_CASE("two-dimensional LP") {
    LinearProgram lp{{1.0, 1.0}, {{{-1.0, -1.0}, -2.0}, {{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}}};
    const auto r = lp_maximize(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(lp.min_slack(r.point) >= -1e-9);
  }

  TEST_CASE("infeasible and unbounded") {
    LinearProgram inf{{1.0}, {{{1.0}, 1.0}, {{-1.0}, 0.0}}};
    CHECK(lp_maximize(inf).status == LpStatus::infeasible);
    LinearProgram unb{{1.0, 0.0}, {{{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}, {{0.0, -1.0}, -1.0}}};
    CHECK(lp_maximize(unb).status == LpStatus::unbounded);
    CHECK(to_string(LpStatus::unbounded) == "unbounded");
  }

  TEST_CASE("malformed programs are rejected") {
    LinearProgram ragged{{1.0, 1.0}, {{{1.0}, 0.0}}};
    CHECK_THROWS_AS(ragged.validate(), InvalidInput);
    LinearProgram wide{std::vector<double>(33, 1.0), {}};
    CHECK_THROWS_AS(wide.validate(), InvalidInput);
  }

  TEST_CASE("deterministic pivots") {
    const auto lp = box(6, {1, -2, 3, 0.5, -1, 2});
    const auto a = lp_maximize(lp), b = lp_maximize(lp);
    CHECK(a.pivots == b.pivots);
    CHECK(a.point == b.point);
    CHECK(a.value == doctest::Approx(6.5));
  }

  TEST_CASE("vertices of a cube in every insertion order") {
    const auto lp = box(3, {0, 0, 0});
    for (auto order : {InsertionOrder::given, InsertionOrder::reversed, InsertionOrder::lexmin}) {
      EnumerationOptions o;
      o.order = order;
      const auto vs = enumerate_vertices(lp, o);
      CHECK(vs.size() == 8);
      check_vertices(lp, vs);
    }
  }

  TEST_CASE("optimal face of the unit square") {
    const auto lp = box(2, {1.0, 0.0});
    const auto vs = optimal_face_vertices(lp, 1.0, 1e-9);
    const auto p = points(vs);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == std::vector<double>{1.0, 0.0});
    CHECK(p[1] == std::vector<double>{1.0, 1.0});
    check_vertices(lp, vs);
  }

  TEST_CASE("standard simplex with a constant objective") {
    LinearProgram lp{{0, 0, 0},
                     {{{1, 1, 1}, 1.0}, {{-1, -1, -1}, -1.0}, {{1, 0, 0}, 0.0}, {{0, 1, 0}, 0.0}, {{0, 0, 1}, 0.0}}};
    const auto vs = optimal_face_vertices(lp, 0.0, 1e-9);
    CHECK(vs.size() == 3);
    check_vertices(lp, vs);
  }

  TEST_CASE("unbounded polyhedra are rejected by the enumerator") {
    LinearProgram lp{{0, 0}, {{{1, 0}, 0.0}, {{0, 1}, 0.0}}};
    CHECK_THROWS_AS(enumerate_vertices(lp), NumericalError);
  }

  TEST_CASE("polishing snaps onto the vertex") {
    const auto lp = box(2, {0, 0});
    const auto v = polish_vertex(lp, {1.0 + 3e-10, -2e-10}, 1e-8);
    CHECK(v.point[0] == 1.0);
    CHECK(v.point[1] == 0.0);
    CHECK(v.active_rank == 2);
  }

  TEST_CASE("deduplication clusters per coordinate") {
    const std::vector<std::vector<double>> pts = {{0.0, 1.0}, {1e-10, 1.0}, {0.5, 0.5}, {0.0, 1.0 + 5e-11}};
    const auto ids = equivalence_classes(pts, 1e-9);
    CHECK(ids[0] == ids[1]);
    CHECK(ids[0] == ids[3]);
    CHECK(ids[0] != ids[2]);
    CHECK(deduplicate(pts, 1e-9).size() == 2);
    CHECK(deduplicate(pts, 1e-12).size() == 4);
  }
}
