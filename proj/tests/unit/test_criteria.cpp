#include <cmath>
#include <random>

#include "doctest.h"

#include "bentcert/criteria.hpp"
#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "../common/random.hpp"

using namespace bentcert;
using namespace bentcert::criteria;

TEST_SUITE("criteria") {
  TEST_CASE("maximally mixed state has no ball") {
    const auto r = ball_radius(BipartiteOperator::maximally_mixed(3, 3));
    // R(1/9) = vec(1) vec(1)^T / 9 has trace norm 3/9.
    CHECK(r.ccnr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.r_b == doctest::Approx(-2.0 / 9.0).epsilon(1e-12));
    CHECK(r.r == 0.0);
  }

  TEST_CASE("report invariants") {
    const auto r = make_radius_report(9, 0.1, 0.02, 1.2);
    CHECK(r.r_a == doctest::Approx(std::sqrt(9.0 / 8.0) * 0.02));
    CHECK(r.r_b == doctest::Approx(0.2 / 3.0));
    CHECK(r.r == doctest::Approx(std::min(r.r_a, r.r_b)));
    CHECK(make_radius_report(9, -1e-9, 0.02, 1.2).r == 0.0);
    CHECK(make_radius_report(9, -1e-11, 0.02, 1.2).r > 0.0);
    CHECK(make_radius_report(9, 0.1, -0.02, 1.2).r == 0.0);
    CHECK(make_radius_report(9, 0.1, 0.02, 0.9).r == 0.0);
  }

  TEST_CASE("non-states are rejected") {
    CHECK_THROWS_AS(ball_radius(BipartiteOperator::identity(3, 3)), InvalidInput);
    CMatrix m = BipartiteOperator::maximally_mixed(2, 2).entries();
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(ball_radius(BipartiteOperator(2, 2, m)), InvalidInput);
  }

  TEST_CASE("extremal eigenvalue direction") {
    const auto x2 = extremal_inf_direction(2);
    CHECK(x2.entries()(0, 0).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(x2.entries()(1, 1).real() == doctest::Approx(-1 / std::sqrt(2.0)));
    const auto x9 = extremal_inf_direction(3, 3);
    CHECK(std::abs(x9.entries().trace()) < 1e-15);
    CHECK(hs_norm(x9.entries()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qmat::eigenvalues(x9.entries()).back() == doctest::Approx(std::sqrt(8.0 / 9.0)).epsilon(1e-14));
  }

  TEST_CASE("extremal realignment direction") {
    for (int dA : {2, 3, 4}) {
      const auto x = extremal_realign_direction(dA);
      CHECK(std::abs(x.entries().trace()) < 1e-14);
      CHECK(hs_norm(x.entries()) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(qmat::is_hermitian(x.entries()));
      CHECK(qmat::trace_norm(qmat::realign(x)) == doctest::Approx(dA).epsilon(1e-12));
    }
  }

  TEST_CASE("unit traceless projection") {
    std::mt19937_64 rng(3);
    const BipartiteOperator h(2, 3, testing::random_hermitian(rng, 6));
    const auto p = unit_traceless(h);
    CHECK(std::abs(p.entries().trace()) < 1e-13);
    CHECK(hs_norm(p.entries()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(unit_traceless(BipartiteOperator::identity(2, 3)), InvalidInput);
  }

  TEST_CASE("probes at zero distance return the state's own values") {
    const auto opt = families::optimize_qutrit();
    const auto rho = families::qutrit_state(opt.params);
    const auto rep = ball_radius(rho);
    for (auto dir : {ProbeDirection::ppt, ProbeDirection::ccnr}) {
      const auto p = probe_boundary(rho, 0.0, dir);
      CHECK(p.lambda_min_pt == doctest::Approx(rep.lambda_min_pt).epsilon(1e-12));
      CHECK(p.ccnr == doctest::Approx(rep.ccnr).epsilon(1e-12));
      CHECK(p.lambda_min_rho == doctest::Approx(rep.lambda_min_rho).scale(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(probe_boundary(rho, -1.0, ProbeDirection::ppt), InvalidInput);
  }

  TEST_CASE("probes at the qutrit optimum") {
    const auto opt = families::optimize_qutrit();
    const auto rho = families::qutrit_state(opt.params);
    const auto ppt = probe_boundary(rho, opt.r, ProbeDirection::ppt);
    CHECK(std::abs(ppt.lambda_min_pt) <= 1e-3);
    CHECK(std::abs(ppt.ccnr - 1.094) <= 0.002);
    CHECK(std::abs(ppt.lambda_min_rho + 0.005) <= 0.002);
    CHECK(ppt.degeneracy >= 1);
    const auto ccnr = probe_boundary(rho, opt.r, ProbeDirection::ccnr);
    CHECK(std::abs(ccnr.lambda_min_pt - 0.03) <= 0.005);
    CHECK(std::abs(ccnr.ccnr - 1.004) <= 0.002);
    CHECK(std::abs(ccnr.lambda_min_rho - 0.01) <= 0.005);
    CHECK(ccnr.degeneracy == 0);
  }

  TEST_CASE("ball guarantee on random bound entangled states") {
    // Random qutrit family members with r > 0, rotated by random local unitaries.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit;
    int states = 0, tries = 0;
    double worst_pt = 1.0, worst_ccnr = 1.0;
    while (states < 1000 && tries < 200000) {
      ++tries;
      const double a = 0.15 + 0.15 * unit(rng);
      const double bc = (1.0 - a) / 3.0, b = bc * unit(rng);
      const auto base = families::qutrit_state({a, b, bc - b});
      const double r = families::qutrit_radius({a, b, bc - b}).r;
      if (r <= 0.0) continue;
      ++states;
      const CMatrix u = kron(testing::random_unitary(rng, 3), testing::random_unitary(rng, 3));
      const BipartiteOperator rho(3, 3, u * base.entries() * u.adjoint());
      for (int i = 0; i < 100; ++i) {
        const auto x = testing::random_direction(rng, 3, 3);
        const BipartiteOperator tau(3, 3, rho.entries() + x.entries() * cplx(r));
        worst_pt = std::min(worst_pt, qmat::min_eigenvalue(qmat::partial_transpose(tau).entries()));
        worst_ccnr = std::min(worst_ccnr, qmat::trace_norm(qmat::realign(tau)));
      }
    }
    REQUIRE(states == 1000);
    CHECK(worst_pt >= -1e-9);
    CHECK(worst_ccnr >= 1.0 - 1e-9);
  }

  TEST_CASE("radius is invariant under local unitaries") {
    std::mt19937_64 rng(22);
    const auto rho = families::qutrit_state(families::optimize_qutrit().params);
    const auto r0 = ball_radius(rho);
    for (int i = 0; i < 20; ++i) {
      const CMatrix u = kron(testing::random_unitary(rng, 3), testing::random_unitary(rng, 3));
      const auto r = ball_radius(BipartiteOperator(3, 3, u * rho.entries() * u.adjoint()));
      CHECK(std::abs(r.lambda_min_pt - r0.lambda_min_pt) < 1e-10);
      CHECK(std::abs(r.ccnr - r0.ccnr) < 1e-10);
      CHECK(std::abs(r.r - r0.r) < 1e-10);
    }
  }
}
