#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "bentcert/error.hpp"
#include "bentcert/families.hpp"

namespace bentcert::families {

namespace {

constexpr double kSqrt98 = 1.0606601717798212;  // sqrt(9/8)

// min(r_a, r_b) without clipping; used as the search objective so that the
// sign carries information outside the bound entangled region.
double raw_radius(const QutritParams& p) {
  const double ra = kSqrt98 * qutrit_pt_min_eig(p);
  const double rb = (qutrit_ccnr(p) - 1.0) / 3.0;
  return std::min(ra, rb);
}

bool inside(const QutritParams& p) { return p.a >= 0.0 && p.b >= 0.0 && p.c >= 0.0; }

QutritParams canonical(QutritParams p) {
  if (p.b > p.c) std::swap(p.b, p.c);
  return p;
}

QutritOptimum finish(QutritParams p, int starts, int evaluations, bool refined) {
  QutritOptimum out;
  out.params = canonical(p);
  const auto rep = qutrit_radius(out.params);
  out.r = rep.r;
  out.r_a = rep.r_a;
  out.r_b = rep.r_b;
  out.starts = starts;
  out.evaluations = evaluations;
  out.refined = refined;
  return out;
}

}  // namespace

QutritParams qutrit_params(double a, double b) { return {a, b, (1.0 - a) / 3.0 - b}; }

void validate(const QutritParams& p) {
  if (p.a < 0.0 || p.b < 0.0 || p.c < 0.0) {
    std::ostringstream msg;
    msg << "qutrit parameters must be nonnegative (a=" << p.a << ", b=" << p.b << ", c=" << p.c << ")";
    throw InvalidInput(msg.str());
  }
  const double s = p.a + 3.0 * (p.b + p.c);
  if (std::fabs(s - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "qutrit parameters violate a + 3(b+c) = 1 (got " << s << ")";
    throw InvalidInput(msg.str());
  }
}

BipartiteOperator qutrit_state(const QutritParams& p) {
  validate(p);
  CMatrix m(9, 9);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) m(4 * k, 4 * l) = p.a / 3.0;
  for (int k = 0; k < 3; ++k) {
    const int i1 = 3 * k + (k + 1) % 3;
    const int i2 = 3 * k + (k + 2) % 3;
    m(i1, i1) += p.b;
    m(i2, i2) += p.c;
  }
  return {3, 3, std::move(m)};
}

double qutrit_pt_min_eig(const QutritParams& p) {
  const double disc = std::sqrt(4.0 * p.a * p.a + 9.0 * (p.b - p.c) * (p.b - p.c));
  return std::min(p.a / 3.0, (1.0 - p.a - disc) / 6.0);
}

double qutrit_ccnr(const QutritParams& p) {
  // The radicand is >= (3(b+c)/2 - 1/3)^2; the clamp only absorbs rounding.
  const double rad = 3.0 * (p.b * p.b + p.c * p.c + p.b * p.c) - (p.b + p.c) + 1.0 / 9.0;
  return 1.0 / 3.0 + 2.0 * p.a + 2.0 * std::sqrt(std::max(rad, 0.0));
}

criteria::RadiusReport qutrit_radius(const QutritParams& p) {
  return criteria::make_radius_report(9, std::min({p.a, p.b, p.c}), qutrit_pt_min_eig(p), qutrit_ccnr(p));
}

QutritOptimum optimize_qutrit(double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidInput("optimize_qutrit: tolerance must be positive");
  int evaluations = 0;
  auto objective = [&](std::span<const double> v) {
    const QutritParams p = qutrit_params(v[0], v[1]);
    if (!inside(p)) return 1.0;
    return -raw_radius(p);
  };

  // 10 x 10 grid of starts inside the simplex: a in (0,1), b a fraction of (1-a)/3.
  QutritParams best{};
  double best_r = -1.0;
  int starts = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double a = (i + 0.5) / 10.0;
      const double b = (j + 0.5) / 10.0 * (1.0 - a) / 3.0;
      const auto res = nelder_mead(objective, {a, b}, 0.02, tolerance * 1e-2, 1e-15);
      evaluations += res.evaluations;
      ++starts;
      const QutritParams p = qutrit_params(res.x[0], res.x[1]);
      if (inside(p) && -res.value > best_r) {
        best_r = -res.value;
        best = p;
      }
    }
  best = canonical(best);

  // The optimum sits on the kink r_a = r_b. Follow that curve in a: for each a
  // solve r_a = r_b for b near the simplex estimate, then maximize over a.
  bool refined = false;
  const double b0 = best.b;
  auto on_curve = [&](double a, double& b_out) {
    auto gap = [&](double b) {
      const QutritParams p = qutrit_params(a, b);
      return kSqrt98 * qutrit_pt_min_eig(p) - (qutrit_ccnr(p) - 1.0) / 3.0;
    };
    for (double w = 1e-4; w < 0.05; w *= 4.0) {
      const double lo = std::max(0.0, b0 - w);
      const double hi = std::min((1.0 - a) / 6.0, b0 + w);  // keeps b <= c
      if (hi <= lo) return false;
      const double glo = gap(lo), ghi = gap(hi);
      if (glo * ghi > 0.0) continue;
      boost::uintmax_t it = 200;
      const auto root = boost::math::tools::toms748_solve(
          gap, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(52), it);
      b_out = 0.5 * (root.first + root.second);
      return true;
    }
    return false;
  };
  double b_dummy = 0.0;
  if (on_curve(best.a, b_dummy)) {
    auto neg_r = [&](double a) {
      double b = 0.0;
      ++evaluations;
      if (!on_curve(a, b)) return 1.0;
      const QutritParams p = qutrit_params(a, b);
      return inside(p) ? -raw_radius(p) : 1.0;
    };
    const double w = 1e-3;
    const auto m = boost::math::tools::brent_find_minima(neg_r, best.a - w, best.a + w, 50);
    double b = 0.0;
    if (on_curve(m.first, b)) {
      const QutritParams p = qutrit_params(m.first, b);
      if (inside(p) && raw_radius(p) >= best_r) {
        best = p;
        refined = true;
      }
    }
  }
  return finish(best, starts, evaluations, refined);
}

QutritOptimum optimize_qutrit_horodecki(double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidInput("optimize_qutrit_horodecki: tolerance must be positive");
  constexpr double a = 2.0 / 7.0;
  const double bmax = (1.0 - a) / 3.0;
  int evaluations = 0;
  auto neg_r = [&](double b) {
    ++evaluations;
    return -raw_radius(qutrit_params(a, b));
  };
  const int bits = std::clamp(static_cast<int>(-std::log2(tolerance)), 8, 52);
  const auto m = boost::math::tools::brent_find_minima(neg_r, 0.0, bmax, bits);
  return finish(qutrit_params(a, m.first), 1, evaluations, false);
}

}  // namespace bentcert::families
