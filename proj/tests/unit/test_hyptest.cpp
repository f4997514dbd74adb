#include <cmath>
#include <random>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "doctest.h"

#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "bentcert/hyptest.hpp"

using namespace bentcert;
using namespace bentcert::hyptest;

namespace {

const families::QutritOptimum& qutrit_opt() {
  static const auto o = families::optimize_qutrit();
  return o;
}

const TestPlan& qutrit_plan() {
  static const auto p = plan(mub_model_qutrit(), families::qutrit_state(qutrit_opt().params), qutrit_opt().r, 0.05);
  return p;
}

const TestPlan& ququart_plan() {
  static const auto p = [] {
    const auto x = families::rank10_example();
    return plan(pauli_pair_model_ququart(), families::bloch_state(x), families::bloch_radius(x).r, 0.025);
  }();
  return p;
}

Table scaled_copy(const Table& t) { return t; }

}  // namespace

TEST_SUITE("hyptest") {
  TEST_CASE("qutrit MUBs are mutually unbiased") {
    const auto m = qutrit_mubs();
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < 3; ++k) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < 3; ++i) s += std::conj(m[a](j, i)) * m[b](k, i);
            const double expect = a == b ? (j == k ? 1.0 : 0.0) : 1.0 / 3.0;
            CHECK(std::abs(std::norm(s) - expect) < 1e-12);
          }
  }

  TEST_CASE("measurement models") {
    const auto q3 = mub_model_qutrit();
    CHECK(q3.settings.size() == 16);
    CHECK(q3.outcomes() == 144);
    CHECK(q3.reduced_dimension() == 128);
    CHECK(span_rank(q3) == 81);
    CHECK_NOTHROW(validate(q3));
    const auto q4 = pauli_pair_model_ququart();
    CHECK(q4.settings.size() == 81);
    CHECK(q4.reduced_dimension() == 1215);
    CHECK(span_rank(q4) == 256);
    CHECK(q4.settings.front().label == "XX|XX");
  }

  TEST_CASE("broken models are rejected") {
    auto m = mub_model_qutrit();
    m.settings[3].effects.pop_back();
    CHECK_THROWS_WITH_AS(validate(m), doctest::Contains(m.settings[3].label.c_str()), InvalidInput);
    auto one = mub_model_qutrit();
    one.settings.resize(1);
    CHECK_THROWS_AS(plan(one, families::qutrit_state(qutrit_opt().params), 0.02, 0.05), InvalidInput);
  }

  TEST_CASE("probability map") {
    const auto t = probability_map(mub_model_qutrit(), qmat::BipartiteOperator::maximally_mixed(3, 3));
    for (const auto& row : t)
      for (double p : row) CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }

  TEST_CASE("traceless product basis") {
    const auto b = traceless_product_basis(3, 3);
    CHECK(b.size() == 80);
    for (std::size_t i = 0; i < b.size(); i += 7) {
      CHECK(std::abs(b[i].trace()) < 1e-13);
      for (std::size_t j = 0; j < b.size(); j += 5)
        CHECK(std::abs(hs_inner(b[i], b[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }

  TEST_CASE("reference plan constants") {
    const auto& q = qutrit_plan();
    CHECK(q.m == 128);
    CHECK(std::abs(q.c1 - 0.0664) <= 5e-4);
    CHECK(std::abs(q.c2 - 0.0416) <= 5e-4);
    CHECK(std::abs(q.hs_offset / q.r0 - 0.6) <= 0.02);
    CHECK(q.useful());
    const auto& p = ququart_plan();
    CHECK(p.m == 1215);
    CHECK(std::abs(p.c1 - 0.0856) <= 1e-3);
    CHECK(std::abs(p.c2 - 0.0469) <= 1e-3);
  }

  TEST_CASE("plan inputs are checked") {
    const auto model = mub_model_qutrit();
    const auto rho = families::qutrit_state(qutrit_opt().params);
    CHECK_THROWS_AS(plan(model, rho, 0.0, 0.05), InvalidInput);
    CHECK_THROWS_AS(plan(model, rho, 0.02, 1.5), InvalidInput);
    PlanOptions bad;
    bad.dropped = {9};
    CHECK_THROWS_AS(plan(model, rho, 0.02, 0.05, bad), InvalidInput);
    // A product basis state gives zero probabilities in the computational setting.
    CMatrix e(9, 9);
    e(0, 0) = 1.0;
    CHECK_THROWS_WITH_AS(plan(model, qmat::BipartiteOperator(3, 3, e), 0.02, 0.0), doctest::Contains("M0|M0"),
                         InvalidInput);
  }

  TEST_CASE("dropped-outcome invariance") {
    std::mt19937_64 rng(5);
    for (int which = 0; which < 2; ++which) {
      const auto model = which == 0 ? mub_model_qutrit() : pauli_pair_model_ququart();
      const auto& ref = which == 0 ? qutrit_plan() : ququart_plan();
      PlanOptions o;
      for (const auto& s : model.settings)
        o.dropped.push_back(std::uniform_int_distribution<int>(0, static_cast<int>(s.effects.size()) - 1)(rng));
      const auto p = plan(model, *ref.target, ref.r0, ref.noise, o);
      CHECK(std::abs(p.c1 - ref.c1) <= 1e-9);
      CHECK(std::abs(p.c2 - ref.c2) <= 1e-9);
    }
  }

  TEST_CASE("covariance at the prepared state") {
    PlanOptions o;
    o.covariance = CovarianceAt::prepared;
    const auto& q = qutrit_plan();
    const auto p = plan(mub_model_qutrit(), *q.target, q.r0, q.noise, o);
    CHECK(p.covariance == CovarianceAt::prepared);
    CHECK(std::abs(p.c1 - 0.0664) <= 5e-4);
    CHECK(std::abs(p.c2 - 0.0416) <= 5e-4);
    CHECK(p.c2 != q.c2);
  }

  TEST_CASE("test statistic") {
    const auto& q = qutrit_plan();
    CHECK(test_statistic(q, q.p_target, 1000.0) == 0.0);
    for (double n : {1e3, 7e4, 1e6}) CHECK(test_statistic(q, q.p_prepared, n) == doctest::Approx(q.c2 * std::sqrt(n)));
    auto x = scaled_copy(q.p_prepared);
    x[0][0] += 0.01;
    x[0][1] -= 0.01;
    CHECK(test_statistic(q, x, 4000.0) == doctest::Approx(2.0 * test_statistic(q, x, 1000.0)).epsilon(1e-14));

    std::vector<std::vector<std::int64_t>> counts;
    Table freq;
    for (const auto& row : q.p_prepared) {
      std::vector<std::int64_t> c;
      std::vector<double> f;
      for (double p : row) c.push_back(static_cast<std::int64_t>(std::llround(p * 50000)));
      std::int64_t tot = 0;
      for (auto v : c) tot += v;
      c.back() += 50000 - tot;
      for (auto v : c) f.push_back(static_cast<double>(v) / 50000.0);
      counts.push_back(c);
      freq.push_back(f);
    }
    CHECK(test_statistic(q, counts) == doctest::Approx(test_statistic(q, freq, 50000.0)).epsilon(1e-12));
    CHECK(p_value(q, counts) == doctest::Approx(p_value(q, freq, 50000.0)).epsilon(1e-12));

    Table short_table(q.p_target.begin(), q.p_target.end() - 1);
    CHECK_THROWS_AS(test_statistic(q, short_table, 10.0), InvalidInput);
    counts[2][0] = -1;
    CHECK_THROWS_AS(test_statistic(q, counts), InvalidInput);
  }

  TEST_CASE("noncentral chi-squared CDF against Boost") {
    double worst = 0.0;
    for (int m : {1, 2, 7, 128, 1215})
      for (double u : {0.0, 0.3, 5.0, 80.0, 600.0, 1500.0, 1e4})
        for (double frac : {0.05, 0.3, 0.7, 1.0, 1.4, 2.5}) {
          const double s = frac * (m + u);
          double ref = 0.0;
          if (u == 0.0)
            ref = boost::math::gamma_p(0.5 * m, 0.5 * s);
          else
            ref = boost::math::cdf(boost::math::non_central_chi_squared(m, u), s);
          worst = std::max(worst, std::abs(noncentral_chi2_cdf(m, s, u) - ref));
        }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("noncentral chi-squared CDF properties") {
    CHECK(noncentral_chi2_cdf(5, 0.0, 3.0) == 0.0);
    CHECK(noncentral_chi2_cdf(2, 4.60517, 0.0) == doctest::Approx(1 - std::exp(-4.60517 / 2)).epsilon(1e-14));
    CHECK(noncentral_chi2_cdf(2, 4.60517, 0.0) == doctest::Approx(0.9).epsilon(1e-5));
    for (int m : {1, 128})
      for (double s : {10.0, 150.0, 400.0}) {
        double prev = 2.0;
        for (double u = 0.0; u <= 500.0; u += 25.0) {
          const double q = noncentral_chi2_cdf(m, s, u);
          CHECK(q <= prev + 1e-15);
          prev = q;
        }
      }
    CHECK_THROWS_AS(noncentral_chi2_cdf(0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(noncentral_chi2_cdf(3, -1.0, 1.0), InvalidInput);
  }

  TEST_CASE("upper tail summed directly") {
    // 50-digit values of the Poisson mixture of upper incomplete gamma functions.
    struct Ref {
      int m;
      double s, u, sf;
    };
    for (const Ref& r : {Ref{1, 400, 75, 4.1693082942065393e-30}, Ref{1, 400, 150, 4.5032211345847717e-15},
                         Ref{128, 1000, 40, 2.3134935209883221e-101}, Ref{128, 600, 300, 1.9353086079820811e-5},
                         Ref{1215, 2000, 100, 3.0364709368883652e-29}})
      CHECK(std::abs(noncentral_chi2_sf(r.m, r.s, r.u) / r.sf - 1.0) <= 1e-11);
    double worst = 0.0, sum_err = 0.0;
    for (int m : {1, 7, 128, 1215})
      for (double u : {0.0, 5.0, 600.0, 1e4})
        for (double frac : {0.05, 0.7, 1.0, 1.4, 4.0}) {
          const double s = frac * (m + u);
          const double ref = u == 0.0 ? boost::math::gamma_q(0.5 * m, 0.5 * s)
                                      : boost::math::cdf(complement(boost::math::non_central_chi_squared(m, u), s));
          const double sf = noncentral_chi2_sf(m, s, u);
          if (ref > 1e-290) worst = std::max(worst, std::abs(sf / ref - 1.0));
          sum_err = std::max(sum_err, std::abs(sf + noncentral_chi2_cdf(m, s, u) - 1.0));
        }
    CHECK(worst <= 1e-10);
    CHECK(sum_err <= 1e-14);
  }

  TEST_CASE("series derivative identity") {
    // d/du q_{2k}(s, 2u) = q_{2k+2}(s, 2u) - q_{2k}(s, 2u)
    const double h = 1e-5;
    for (int k : {1, 3, 64})
      for (double s : {5.0, 60.0, 200.0})
        for (double u : {0.5, 10.0, 80.0}) {
          const double d = (noncentral_chi2_cdf(2 * k, s, 2 * (u + h)) - noncentral_chi2_cdf(2 * k, s, 2 * (u - h))) / (2 * h);
          const double rhs = noncentral_chi2_cdf(2 * k + 2, s, 2 * u) - noncentral_chi2_cdf(2 * k, s, 2 * u);
          CHECK(std::abs(d - rhs) <= 1e-6);
        }
  }

  TEST_CASE("quantile") {
    CHECK(chi2_quantile(2, 0.9, 0.0) == doctest::Approx(-2 * std::log(0.1)).epsilon(1e-10));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit;
    for (int i = 0; i < 100; ++i) {
      const int m = 1 + static_cast<int>(unit(rng) * 1300);
      const double p = 0.001 + 0.998 * unit(rng), u = 2000 * unit(rng);
      CHECK(std::abs(noncentral_chi2_cdf(m, chi2_quantile(m, p, u), u) - p) <= 1e-10);
    }
    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.05) {
      const double s = chi2_quantile(128, p, 300.0);
      CHECK(s > prev);
      prev = s;
    }
    CHECK_THROWS_AS(chi2_quantile(3, 1.0, 0.0), InvalidInput);
  }

  TEST_CASE("failure probability") {
    CHECK(significance(3.0) == doctest::Approx(std::erfc(3 / std::sqrt(2.0))));
    for (const TestPlan* p : {&qutrit_plan(), &ququart_plan()})
      for (int k = 1; k <= 4; ++k) {
        double prev = 1.0;
        for (double n = 1e3; n <= 3e5; n *= 1.25) {
          const double f = hyptest::p_fail(*p, k, n).p_fail;
          CHECK(f >= 0.0);
          CHECK(f <= prev + 1e-12);
          prev = f;
        }
      }
    const auto tiny = hyptest::p_fail(qutrit_plan(), 3.0, 1e-6);
    CHECK(tiny.p_fail == doctest::Approx(1.0 - tiny.p0).epsilon(1e-4));
    CHECK(hyptest::p_fail(128, 0.04, 0.05, 3.0, 1e4).warning);
    CHECK_FALSE(hyptest::p_fail(qutrit_plan(), 3.0, 1e4).warning);
  }

  TEST_CASE("required samples") {
    const auto& q = qutrit_plan();
    const double n = required_samples(q.m, q.c1, q.c2, 3.0, 1e-3);
    CHECK(n >= 5e4);
    CHECK(n <= 1.1e5);
    CHECK(hyptest::p_fail(q, 3.0, n).p_fail <= 1e-3 + 1e-9);
    CHECK(hyptest::p_fail(q, 3.0, 0.99 * n).p_fail > 1e-3);
    CHECK_THROWS_AS(required_samples(128, 0.04, 0.05, 3.0, 1e-3), NumericalError);
  }

  TEST_CASE("p-values") {
    const auto& q = qutrit_plan();
    CHECK(p_value(q, q.p_target, 7e4) == 0.0);
    const double pv = p_value(q, q.p_prepared, 1e5);
    CHECK(pv == doctest::Approx(noncentral_chi2_cdf(q.m, q.c2 * q.c2 * 1e5, q.c1 * q.c1 * 1e5)));
    CHECK(pv < significance(3.0));
    auto x = q.p_prepared;
    double prev = -1.0;
    for (double step = 0.0; step <= 0.02; step += 0.004) {
      x[5][2] = q.p_prepared[5][2] + step;
      x[5][4] = q.p_prepared[5][4] - step;
      const double v = p_value(q, x, 5e4);
      CHECK(v >= prev);
      prev = v;
    }
  }
}
