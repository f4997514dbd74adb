#include <cmath>

#include "doctest.h"

#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "bentcert/simulate.hpp"

using namespace bentcert;
using namespace bentcert::simulate;

namespace {

SimConfig qutrit_config() {
  static const auto p = [] {
    const auto o = families::optimize_qutrit();
    return hyptest::plan(hyptest::mub_model_qutrit(), families::qutrit_state(o.params), o.r, 0.05);
  }();
  SimConfig c;
  c.plan = p;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("configuration checks") {
    auto c = qutrit_config();
    c.n = 0;
    CHECK_THROWS_AS(validate(c), InvalidInput);
    c.n = 10;
    c.trials = 0;
    CHECK_THROWS_AS(validate(c), InvalidInput);
    c.trials = 1;
    hyptest::Table bad = {{0.5, 0.6}};
    CHECK_THROWS_AS(sample_counts(c, bad), InvalidInput);
  }

  TEST_CASE("streams are keyed, not sequential") {
    Stream a(1, 2, 3), b(1, 2, 3), c(1, 2, 4), d(2, 2, 3);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }

  TEST_CASE("counts are deterministic and sum to n") {
    auto c = qutrit_config();
    c.n = 5000;
    const auto a = sample_counts(c, c.plan.p_prepared, 3);
    const auto b = sample_counts(c, c.plan.p_prepared, 3);
    CHECK(a == b);
    CHECK(a != sample_counts(c, c.plan.p_prepared, 4));
    for (const auto& row : a) {
      std::int64_t s = 0;
      for (auto v : row) s += v;
      CHECK(s == 5000);
    }
  }

  TEST_CASE("frequencies concentrate") {
    auto c = qutrit_config();
    c.n = 1000000;
    const auto model = hyptest::mub_model_qutrit();
    const auto counts = sample_counts(c, model, qmat::BipartiteOperator::maximally_mixed(3, 3));
    const double p = 1.0 / 9.0, sd = std::sqrt(p * (1 - p) / 1e6);
    for (const auto& row : counts)
      for (auto v : row) CHECK(std::abs(static_cast<double>(v) / 1e6 - p) <= 5 * sd);
  }

  TEST_CASE("mean frequencies match the probability map") {
    auto c = qutrit_config();
    c.n = 200;
    const int trials = 10000;
    const auto& p = c.plan.p_prepared;
    for (auto mode : {Sampling::multinomial, Sampling::poisson}) {
      c.sampling = mode;
      std::vector<std::vector<double>> sum(p.size(), std::vector<double>(p[0].size(), 0.0));
      for (int t = 0; t < trials; ++t) {
        const auto counts = sample_counts(c, p, static_cast<std::uint64_t>(t));
        for (std::size_t l = 0; l < p.size(); ++l)
          for (std::size_t k = 0; k < p[l].size(); ++k) sum[l][k] += static_cast<double>(counts[l][k]) / c.n;
      }
      for (std::size_t l = 0; l < p.size(); ++l)
        for (std::size_t k = 0; k < p[l].size(); ++k) {
          const double sd = std::sqrt(p[l][k] / c.n);  // per-trial sd, at least the binomial one
          CHECK(std::abs(sum[l][k] / trials - p[l][k]) <= 5 * sd / std::sqrt(trials));
        }
    }
  }

  TEST_CASE("Wilson interval") {
    const auto i = wilson_interval(0, 100);
    CHECK(i.lo == 0.0);
    CHECK(i.hi == doctest::Approx(0.0370).epsilon(1e-2));
    const auto j = wilson_interval(50, 100);
    CHECK(j.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(j.hi == doctest::Approx(0.5962).epsilon(1e-3));
    CHECK_THROWS_AS(wilson_interval(5, 3), InvalidInput);
  }

  TEST_CASE("empirical failure rate matches the analytic one") {
    auto c = qutrit_config();
    c.n = 20000;
    const auto e = empirical_pfail(c, 3.0);
    CHECK(e.trials == 2000);
    CHECK(e.analytic >= e.ci95.lo);
    CHECK(e.analytic <= e.ci95.hi);
    CHECK(std::abs(e.fraction - e.analytic) <= 4 * std::sqrt(e.analytic * (1 - e.analytic) / e.trials));
  }

  TEST_CASE("huge samples never fail") {
    auto c = qutrit_config();
    c.n = 1000000;
    c.trials = 300;
    CHECK(empirical_pfail(c, 3.0).fraction == 0.0);
  }

  TEST_CASE("multinomial and Poisson sampling agree") {
    auto c = qutrit_config();
    c.n = 20000;
    const auto a = empirical_pfail(c, 3.0);
    c.sampling = Sampling::poisson;
    const auto b = empirical_pfail(c, 3.0);
    const double pooled = (a.failures + b.failures) / (2.0 * c.trials);
    const double sd = std::sqrt(pooled * (1 - pooled) * 2.0 / c.trials);
    CHECK(std::abs(a.fraction - b.fraction) <= 3 * sd);
  }

  TEST_CASE("worst-case offset is accepted at most at the significance level") {
    // rho0 + r0 Delta with Delta the unit direction of smallest Fisher
    // eigenvalue: the hardest alternative at the ball's edge.
    auto c = qutrit_config();
    const auto basis = hyptest::traceless_product_basis(3, 3);
    CMatrix delta(9, 9);
    for (std::size_t i = 0; i < basis.size(); ++i) delta += basis[i] * cplx(c.plan.worst_direction[i]);
    CHECK(hs_norm(delta) == doctest::Approx(1.0).epsilon(1e-12));
    const qmat::BipartiteOperator shifted(3, 3, c.plan.target->entries() + delta * cplx(c.plan.r0));
    const auto probs = hyptest::probability_map(hyptest::mub_model_qutrit(), shifted);
    for (const auto& row : probs)
      for (double p : row) REQUIRE(p > 0.0);
    for (double k : {1.0, 2.0}) {
      c.n = 20000;
      const auto e = empirical_pfail(c, k, probs);
      const double accepted = 1.0 - e.fraction;
      CHECK(accepted <= e.p0 + 3 * std::sqrt(e.p0 * (1 - e.p0) / e.trials));
    }
  }

  TEST_CASE("results do not depend on the worker count") {
    auto c = qutrit_config();
    c.n = 20000;
    c.trials = 200;
    c.workers = 1;
    const auto a = empirical_pfail(c, 2.0);
    c.workers = 4;
    const auto b = empirical_pfail(c, 2.0);
    CHECK(a.failures == b.failures);
  }
}
