#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bentcert/criteria.hpp"
#include "bentcert/families.hpp"
#include "bentcert/hyptest.hpp"
#include "bentcert/simulate.hpp"
#include "random.hpp"

namespace testing {

using namespace bentcert;

std::vector<DirectionBounds> direction_bounds(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DirectionBounds> out;
  for (int dA : {2, 3, 4}) {
    const int d = dA * dA;
    const double inf_bound = std::sqrt((d - 1.0) / d);
    const double realign_bound = std::sqrt(static_cast<double>(d));
    DirectionBounds b;
    b.dimension = dA;
    b.max_inf_excess = -1.0;
    b.max_realign_excess = -1.0;
    for (int i = 0; i < samples; ++i) {
      const auto x = random_direction(rng, dA, dA);
      b.max_inf_excess = std::max(b.max_inf_excess, qmat::eigenvalues(x.entries()).back() - inf_bound);
      b.max_realign_excess =
          std::max(b.max_realign_excess, qmat::trace_norm(qmat::realign(x)) - realign_bound);
    }
    const auto wi = criteria::extremal_inf_direction(dA, dA);
    b.inf_witness_error = std::abs(qmat::eigenvalues(wi.entries()).back() - inf_bound);
    const auto wr = criteria::extremal_realign_direction(dA);
    b.realign_witness_error = std::abs(qmat::trace_norm(qmat::realign(wr)) - realign_bound);
    out.push_back(b);
  }
  return out;
}

ClosedFormAgreement qutrit_closed_forms(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit;
  ClosedFormAgreement out;
  for (int i = 0; i < samples; ++i) {
    // Uniform on the simplex a + 3b + 3c = 1.
    double e1 = -std::log(unit(rng)), e2 = -std::log(unit(rng)), e3 = -std::log(unit(rng));
    const double t = e1 + e2 + e3;
    const families::QutritParams p{e1 / t, e2 / t / 3.0, e3 / t / 3.0};
    const auto rho = families::qutrit_state(p);
    const double pt = qmat::min_eigenvalue(qmat::partial_transpose(rho).entries());
    const double ccnr = qmat::trace_norm(qmat::realign(rho));
    out.pt_error = std::max(out.pt_error, std::abs(pt - families::qutrit_pt_min_eig(p)));
    out.ccnr_error = std::max(out.ccnr_error, std::abs(ccnr - families::qutrit_ccnr(p)));
  }
  return out;
}

LinearFormAgreement bloch_linear_form(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-0.25, 0.25);
  const auto& sign = families::sign_structure();
  LinearFormAgreement out;
  for (int i = 0; i < samples; ++i) {
    families::BlochCoeffs x;
    x.x[0] = 0.25;
    for (int k = 1; k < families::kBloch; ++k) x.x[static_cast<std::size_t>(k)] = coeff(rng);
    const auto rho = families::bloch_state(x);
    auto linear = families::bloch_eigenvalues(x);
    std::sort(linear.begin(), linear.end());
    const auto dense = qmat::eigenvalues(rho.entries());
    for (std::size_t j = 0; j < dense.size(); ++j)
      out.spectrum_error = std::max(out.spectrum_error, std::abs(dense[j] - linear[j]));

    families::BlochCoeffs dx = x;
    for (int k = 1; k < families::kBloch; ++k)
      dx.x[static_cast<std::size_t>(k)] *= sign.D[static_cast<std::size_t>(k - 1)];
    const auto pt = qmat::eigenvalues(qmat::partial_transpose(rho).entries());
    const auto flipped = qmat::eigenvalues(families::bloch_state(dx).entries());
    for (std::size_t j = 0; j < pt.size(); ++j) out.pt_error = std::max(out.pt_error, std::abs(pt[j] - flipped[j]));
  }
  return out;
}

std::vector<MonteCarloPoint> noncentral_chi2_monte_carlo(int samples, std::uint64_t seed) {
  // s near the 10%, 50%, 90% and 99% points of each distribution.
  struct Grid {
    int m;
    double u;
  };
  const Grid grid[] = {{1, 0.5}, {2, 4.0}, {5, 10.0}, {20, 30.0}, {128, 40.0}};
  const double levels[] = {0.1, 0.5, 0.9, 0.99};
  std::vector<MonteCarloPoint> out;
  std::mt19937_64 rng(seed);
  for (const auto& g : grid) {
    std::normal_distribution<double> normal;
    std::vector<double> draws(static_cast<std::size_t>(samples));
    for (auto& v : draws) {
      // First coordinate carries the whole offset; the other m - 1 are central.
      const double z = normal(rng) + std::sqrt(g.u);
      double rest = 0.0;
      if (g.m > 1) rest = std::chi_squared_distribution<double>(g.m - 1)(rng);
      v = z * z + rest;
    }
    std::sort(draws.begin(), draws.end());
    for (double level : levels) {
      MonteCarloPoint p;
      p.m = g.m;
      p.u = g.u;
      p.s = hyptest::chi2_quantile(g.m, level, g.u);
      p.analytic = hyptest::noncentral_chi2_cdf(g.m, p.s, g.u);
      const auto below = std::lower_bound(draws.begin(), draws.end(), p.s) - draws.begin();
      p.empirical = static_cast<double>(below) / samples;
      p.z = std::abs(p.empirical - p.analytic) / std::sqrt(p.analytic * (1.0 - p.analytic) / samples);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<SimulationPoint> simulated_failure(int trials, std::uint64_t seed, hyptest::CovarianceAt covariance) {
  const auto opt = families::optimize_qutrit();
  simulate::SimConfig cfg;
  hyptest::PlanOptions po;
  po.covariance = covariance;
  cfg.plan = hyptest::plan(hyptest::mub_model_qutrit(), families::qutrit_state(opt.params), opt.r, 0.05, po);
  cfg.trials = trials;
  cfg.seed = seed;
  std::vector<SimulationPoint> out;
  for (auto [n, k] : {std::pair{20000.0, 3.0}, std::pair{50000.0, 2.0}, std::pair{70000.0, 3.0}}) {
    cfg.n = static_cast<std::int64_t>(n);
    const auto e = simulate::empirical_pfail(cfg, k);
    SimulationPoint p{n, k, e.analytic, e.fraction, e.ci95.lo, e.ci95.hi, 0.0};
    const double sd = std::sqrt(std::max(e.analytic * (1.0 - e.analytic), 1e-300) / trials);
    p.z = std::abs(e.fraction - e.analytic) / sd;
    out.push_back(p);
  }
  return out;
}

}  // namespace testing
