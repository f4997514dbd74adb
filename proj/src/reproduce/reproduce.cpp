#include "bentcert/reproduce.hpp"

#include <cmath>

#include "bentcert/criteria.hpp"
#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "bentcert/hyptest.hpp"
#include "bentcert/io.hpp"

namespace bentcert::reproduce {

namespace {

hyptest::TestPlan qutrit_plan(const families::QutritOptimum& opt, double noise) {
  return hyptest::plan(hyptest::mub_model_qutrit(), families::qutrit_state(opt.params), opt.r, noise);
}

hyptest::TestPlan ququart_plan(double noise) {
  const auto x = families::rank10_example();
  return hyptest::plan(hyptest::pauli_pair_model_ququart(), families::bloch_state(x), families::bloch_radius(x).r,
                       noise);
}

double mub_overlap_error() {
  const auto mubs = hyptest::qutrit_mubs();
  double worst = 0.0;
  for (std::size_t a = 0; a < mubs.size(); ++a)
    for (std::size_t b = a + 1; b < mubs.size(); ++b)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          cplx s = 0.0;
          for (std::size_t i = 0; i < 3; ++i) s += std::conj(mubs[a](j, i)) * mubs[b](k, i);
          worst = std::max(worst, std::abs(std::norm(s) - 1.0 / 3.0));
        }
  return worst;
}

}  // namespace

Check within(std::string name, double value, double expected, double tolerance) {
  return {std::move(name), value, expected - tolerance, expected + tolerance, false, {}};
}

Check in_range(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, lo, hi, false, {}};
}

std::vector<Check> all_checks(const Options& options) {
  std::vector<Check> out;
  auto add = [&](Check c) {
    if (options.on_check) options.on_check(c);
    out.push_back(std::move(c));
  };

  // Witnesses of the two extremal norms.
  {
    const auto x = criteria::extremal_inf_direction(9);
    add(within("max eigenvalue of a unit traceless direction, d=9", qmat::eigenvalues(x.entries()).back(),
               std::sqrt(8.0 / 9.0), 1e-10));
    const auto y = criteria::extremal_realign_direction(3);
    add(within("max realignment trace norm of a unit traceless direction, dA=3", qmat::trace_norm(qmat::realign(y)),
               3.0, 1e-10));
    const auto basis = qmat::operator_basis(3, qmat::BasisKind::gellmann);
    const auto r = qmat::realign(criteria::extremal_inf_direction(3, 3));
    cplx corner = 0.0;  // <g0 (x) g0, R(X)> for the identity-proportional g0
    for (std::size_t i = 0; i < r.rows(); ++i)
      for (std::size_t j = 0; j < r.cols(); ++j)
        corner += std::conj(basis.elements[0](i / 3, i % 3)) * r(i, j) * basis.elements[0](j / 3, j % 3);
    add(within("traceless X: [R(X)]_11 in the Gell-Mann basis", std::abs(corner), 0.0, 1e-12));
  }

  // Qutrits.
  const auto qo = families::optimize_qutrit();
  add(within("qutrit optimum a", qo.params.a, 0.21289, 1e-4));
  add(within("qutrit optimum b", qo.params.b, 0.04834, 1e-4));
  add(within("qutrit optimum c", qo.params.c, 0.21403, 1e-4));
  add(within("qutrit optimum r*", qo.r, 0.02345, 1e-5));
  const auto rho = families::qutrit_state(qo.params);
  add(within("qutrit optimum rank", families::state_rank(rho), 7, 0));
  {
    const families::QutritParams swapped{qo.params.a, qo.params.c, qo.params.b};
    add(within("qutrit r* under b <-> c", criteria::ball_radius(families::qutrit_state(swapped)).r, qo.r, 1e-12));
  }
  {
    const auto ppt = criteria::probe_boundary(rho, qo.r, criteria::ProbeDirection::ppt);
    add(within("PPT probe: lambda_min of partial transpose", ppt.lambda_min_pt, 0.0, 1e-3));
    add(within("PPT probe: realignment trace norm", ppt.ccnr, 1.094, 0.002));
    add(within("PPT probe: lambda_min", ppt.lambda_min_rho, -0.005, 0.002));
    const auto ccnr = criteria::probe_boundary(rho, qo.r, criteria::ProbeDirection::ccnr);
    add(within("CCNR probe: lambda_min of partial transpose", ccnr.lambda_min_pt, 0.03, 0.005));
    add(within("CCNR probe: realignment trace norm", ccnr.ccnr, 1.004, 0.002));
    add(within("CCNR probe: lambda_min", ccnr.lambda_min_rho, 0.01, 0.005));
  }
  const auto ho = families::optimize_qutrit_horodecki();
  add(within("Horodecki family r", ho.r, 0.01681, 1e-5));
  add(within("Horodecki family a", ho.params.a, 0.28571, 1e-5));
  add(within("Horodecki family b", ho.params.b, 0.07931, 1e-5));
  add(within("Horodecki family c", ho.params.c, 0.15879, 1e-5));

  // Ququarts.
  const auto sym = families::optimize_ququart_symmetric();
  add(within("symmetric ququart s*", sym.s_star, 0.05571, 1e-5));
  add(within("symmetric ququart r*", sym.r_star, 0.0214, 1e-4));
  {
    const auto rep = families::bloch_radius(sym.example);
    add(within("symmetric example: lambda_min of partial transpose", rep.lambda_min_pt, 1.0 / 16 - 0.75 * sym.s_star,
               1e-12));
    std::uint32_t orthant = 0;
    for (int k = 1; k < families::kBloch; ++k)
      if (sym.example.x[static_cast<std::size_t>(k)] < 0.0) orthant |= 1u << (k - 1);
    const auto lp = polytope::lp_maximize(families::orthant_lp(orthant));
    add(within("orthant LP of the symmetric example", lp.value, sym.r_star, 1e-9));
  }
  {
    const auto x10 = families::rank10_example();
    add(within("rank-10 example: rank", families::state_rank(families::bloch_state(x10)), 10, 0));
    add(within("rank-10 example: radius", criteria::ball_radius(families::bloch_state(x10)).r, sym.r_star, 1e-6));
    const auto x9 = families::rank9_example();
    add(within("rank-9 example: rank", families::state_rank(families::bloch_state(x9)), 9, 0));
    add(within("rank-9 example: radius", criteria::ball_radius(families::bloch_state(x9)).r, 0.0128, 1e-3));
  }
  {
    families::LpSweepOptions o;
    o.workers = options.workers;
    const auto sweep = families::optimize_ququart_lp(families::LpMode::max_only, o);
    add(within("orthant sweep max r*", sweep.r_star, sym.r_star, 1e-9));
  }
  if (options.census) {
    families::LpSweepOptions o;
    o.workers = options.workers;
    const auto census = families::optimize_ququart_lp(families::LpMode::census, o);
    auto c = within("census: optimal vertices", static_cast<double>(census.optimal_vertices.size()), 4224, 0);
    c.note = "dedup tolerance " + io::format_double(o.dedup_tol);
    add(c);
    add(within("census: minimal rank among optimal vertices", census.min_rank_optimal, 10, 0));
    add(within("census: minimal rank with r > 0", census.min_rank_positive, 9, 0));
    add(within("census: radius at minimal rank", census.min_rank_positive_example.radius, 0.0128, 1e-3));
  } else {
    for (const char* name : {"census: optimal vertices", "census: minimal rank among optimal vertices",
                             "census: minimal rank with r > 0", "census: radius at minimal rank"}) {
      Check c{name, 0.0, 0.0, 0.0, true, "run with --census"};
      add(c);
    }
  }

  // Measurements and test plans.
  add(within("qutrit MUB overlaps |<e|f>|^2 - 1/3", mub_overlap_error(), 0.0, 1e-12));
  const auto tq = qutrit_plan(qo, 0.05);
  add(within("qutrit plan m", tq.m, 128, 0));
  add(within("qutrit plan c1", tq.c1, 0.0664, 5e-4));
  add(within("qutrit plan c2", tq.c2, 0.0416, 5e-4));
  add(within("qutrit plan ||rho0 - rho_exp|| / r0", tq.hs_offset / tq.r0, 0.6, 0.02));
  const auto t4 = ququart_plan(0.025);
  add(within("ququart plan m", t4.m, 1215, 0));
  add(within("ququart plan c1", t4.c1, 0.0856, 1e-3));
  add(within("ququart plan c2", t4.c2, 0.0469, 1e-3));

  const double n_opt = hyptest::required_samples(tq.m, tq.c1, tq.c2, 3.0, 1e-3);
  add(in_range("qutrit plan: n for p_fail <= 1e-3 at 3 sigma", n_opt, 5e4, 1.1e5));
  add(in_range("qutrit plan: p_fail at n = 70000, 3 sigma", hyptest::p_fail(tq, 3.0, 7e4).p_fail, 0.0, 1e-3));
  {
    const auto th = qutrit_plan(ho, 0.05);
    const double n_h = hyptest::required_samples(th.m, th.c1, th.c2, 3.0, 1e-3);
    auto c = in_range("Horodecki / optimal required n at 3 sigma, p_fail 1e-3", n_h / n_opt, 1.6, 2.6);
    c.note = "both prepared with 5% white noise";
    add(c);
  }
  return out;
}

std::string figure2_csv(char panel) {
  hyptest::TestPlan tp;
  if (panel == 'a')
    tp = qutrit_plan(families::optimize_qutrit(), 0.05);
  else if (panel == 'b')
    tp = ququart_plan(0.025);
  else
    throw InvalidInput("figure panel must be 2a or 2b");
  io::CsvWriter csv({"n", "k", "p_fail"});
  for (int k = 1; k <= 4; ++k)
    for (int n = 1000; n <= 150000; n += 1000)
      csv.row({static_cast<double>(n), static_cast<double>(k), hyptest::p_fail(tp, k, n).p_fail});
  return csv.str();
}

}  // namespace bentcert::reproduce
