#include <algorithm>
#include <cmath>
#include <numeric>

#include "bentcert/families.hpp"

namespace bentcert::families {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double step, double xtol, double ftol,
                             int max_evaluations) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> val(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> idx(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
  };

  while (evals < max_evaluations) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];

    double diam = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::fabs(pts[i][j] - pts[best][j]));
    if (diam < xtol && val[worst] - val[best] < ftol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    along(-1.0, trial, pts[worst]);
    const double fr = eval(trial);
    if (fr < val[best]) {
      along(-2.0, trial2, pts[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        val[worst] = fe;
      } else {
        pts[worst] = trial;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = trial;
      val[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < val[worst];
    along(outside ? -0.5 : 0.5, trial2, pts[worst]);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = trial2;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      val[i] = eval(pts[i]);
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  return {pts[b], val[b], evals};
}

}  // namespace bentcert::families
