#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "bentcert/error.hpp"
#include "bentcert/hyptest.hpp"

namespace bentcert::hyptest {

// q_m(s, u) = sum_l Pois(l; u/2) P(l + m/2, s/2), P the regularized lower
// incomplete gamma function. Only the Poisson window around u/2 contributes;
// P along the window follows from one Boost evaluation and the recurrence
// P(a+1, x) = P(a, x) - x^a e^-x / Gamma(a+1). The upper tail uses
// Q = 1 - P with the opposite sign, so small tails keep full precision.
namespace {

double poisson_mixture(int m, double s, double u, bool upper) {
  if (m < 1) throw InvalidInput("noncentral_chi2: m must be positive");
  if (s < 0.0 || u < 0.0) throw InvalidInput("noncentral_chi2: s and u must be nonnegative");
  if (s == 0.0) return upper ? 1.0 : 0.0;
  const double a0 = 0.5 * m;
  const double x = 0.5 * s;
  if (u == 0.0) return upper ? boost::math::gamma_q(a0, x) : boost::math::gamma_p(a0, x);
  const double sign = upper ? -1.0 : 1.0;

  const double lam = 0.5 * u;
  const double spread = 40.0 * std::sqrt(lam + 1.0);
  const auto lo = static_cast<long>(std::max(0.0, std::floor(lam - spread)));
  const auto hi = static_cast<long>(std::ceil(lam + spread));
  const long mid = std::clamp(static_cast<long>(std::floor(lam)), lo, hi);

  // Window-centre terms from Boost: forming them as exp(-lam + mid log lam -
  // lgamma(mid + 1)) cancels terms of size lam log lam and loses digits.
  const double log_x = std::log(x);
  const double w_mid = boost::math::gamma_p_derivative(mid + 1.0, lam);
  const double t_mid = boost::math::gamma_p_derivative(a0 + mid + 1.0, x);
  const double ls_mid = t_mid > std::numeric_limits<double>::min()
                            ? std::log(t_mid)
                            : (a0 + mid) * log_x - x - boost::math::lgamma(a0 + mid + 1.0);
  const double p_mid = upper ? boost::math::gamma_q(a0 + mid, x) : boost::math::gamma_p(a0 + mid, x);
  double sum = w_mid * p_mid;

  double p = p_mid, w = w_mid, ls = ls_mid;  // ls: log of x^a e^-x / Gamma(a + 1), a = a0 + l
  for (long l = mid + 1; l <= hi; ++l) {
    p = std::clamp(p - sign * std::exp(ls), 0.0, 1.0);
    ls += log_x - std::log(a0 + l);
    w *= lam / static_cast<double>(l);
    // Past the Poisson mode w decays; the remaining terms are bounded by w
    // times the largest p still to come (1 where p grows).
    if ((upper ? w : w * p) < 1e-20 * sum) break;
    sum += w * p;
  }
  p = p_mid, w = w_mid, ls = ls_mid;
  for (long l = mid - 1; l >= lo; --l) {
    ls -= log_x - std::log(a0 + l + 1.0);
    p = std::clamp(p + sign * std::exp(ls), 0.0, 1.0);
    w *= static_cast<double>(l + 1) / lam;
    if ((upper ? w * p : w) < 1e-20 * sum) break;
    sum += w * p;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double noncentral_chi2_cdf(int m, double s, double u) { return poisson_mixture(m, s, u, false); }

double noncentral_chi2_sf(int m, double s, double u) { return poisson_mixture(m, s, u, true); }

double chi2_quantile(int m, double p, double u) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("chi2_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = std::pow(std::sqrt(u) + 10.0 * std::sqrt(static_cast<double>(m)), 2);
  while (noncentral_chi2_cdf(m, hi, u) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (noncentral_chi2_cdf(m, mid, u) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double significance(double k_sigma) { return std::erfc(k_sigma / std::sqrt(2.0)); }

FailureEstimate p_fail(int m, double c1, double c2, double k_sigma, double n) {
  if (n < 0.0) throw InvalidInput("p_fail: n must be nonnegative");
  FailureEstimate f;
  f.p0 = significance(k_sigma);
  f.warning = !(c1 > c2);
  f.t0_sq = chi2_quantile(m, f.p0, c1 * c1 * n);
  f.p_fail = noncentral_chi2_sf(m, f.t0_sq, c2 * c2 * n);
  return f;
}

FailureEstimate p_fail(const TestPlan& plan, double k_sigma, double n) {
  return p_fail(plan.m, plan.c1, plan.c2, k_sigma, n);
}

double required_samples(int m, double c1, double c2, double k_sigma, double target) {
  auto excess = [&](double log_n) { return p_fail(m, c1, c2, k_sigma, std::exp(log_n)).p_fail - target; };
  const double log_max = std::log(1e12);
  if (excess(0.0) <= 0.0) return 1.0;
  // Bracket by decades so that huge n, where q_m is expensive, is only
  // visited when needed.
  double lo = 0.0, hi = 0.0;
  for (;;) {
    hi = std::min(lo + std::log(10.0), log_max);
    if (excess(hi) <= 0.0) break;
    if (hi >= log_max) {
      std::ostringstream msg;
      msg << "required_samples: p_fail stays above " << target << " up to n = 1e12";
      throw NumericalError(msg.str());
    }
    lo = hi;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

}  // namespace bentcert::hyptest
