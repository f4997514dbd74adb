#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "bentcert/error.hpp"
#include "bentcert/polytope.hpp"
#include "bentcert/simd/kernels.hpp"

namespace bentcert::polytope {

void LinearProgram::validate() const {
  const std::size_t n = variables();
  if (n == 0) throw InvalidInput("linear program: no variables");
  if (n > 32) throw InvalidInput("linear program: at most 32 variables are supported");
  for (std::size_t i = 0; i < constraints.size(); ++i)
    if (constraints[i].coefficients.size() != n) {
      std::ostringstream msg;
      msg << "linear program: constraint " << i << " has " << constraints[i].coefficients.size()
          << " coefficients, expected " << n;
      throw InvalidInput(msg.str());
    }
}

double LinearProgram::min_slack(const std::vector<double>& x) const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coefficients[j] * x[j];
    worst = std::min(worst, lhs - c.bound);
  }
  return worst;
}

double LinearProgram::value(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += objective[j] * x[j];
  return v;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Dense tableau for  min cost.z  s.t.  T z = rhs, z >= 0.
// Row m holds the reduced costs; column `width - 1` the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), w_(cols + 1), t_((rows + 1) * w_, 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * w_ + j]; }
  double* row(std::size_t i) { return t_.data() + i * w_; }
  double& rhs(std::size_t i) { return at(i, w_ - 1); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return w_ - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const auto& k = simd::active();
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < w_; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == pr) continue;
      double* r = row(i);
      const double f = r[pc];
      if (f == 0.0) continue;
      k.axpy(-f, prow, r, w_);
      r[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads a cost vector into the objective row and prices out the basis.
  void set_cost(const std::vector<double>& cost) {
    double* z = row(m_);
    for (std::size_t j = 0; j < w_; ++j) z[j] = j < cost.size() ? cost[j] : 0.0;
    const auto& k = simd::active();
    for (std::size_t i = 0; i < m_; ++i) {
      const double f = z[basis_[i]];
      if (f != 0.0) k.axpy(-f, row(i), z, w_);
    }
  }

  void drop_row(std::size_t r) {
    for (std::size_t i = r; i < m_; ++i)
      for (std::size_t j = 0; j < w_; ++j) at(i, j) = at(i + 1, j);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
    t_.resize((m_ + 1) * w_);
  }

  void dump(std::ostream& os, const char* label) const {
    os << "-- tableau (" << label << ") --\n";
    for (std::size_t i = 0; i <= m_; ++i) {
      os << (i < m_ ? "b" + std::to_string(basis_[i]) : std::string("z")) << ':';
      for (std::size_t j = 0; j < w_; ++j) os << ' ' << at(i, j);
      os << '\n';
    }
  }

 private:
  std::size_t m_;
  std::size_t w_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded, pivot_limit };

// Bland's rule: lowest-index improving column; ratio-test ties go to the
// lowest basic index.
PhaseResult run_phase(Tableau& tab, std::size_t allowed_cols, const SimplexOptions& opt, int& pivots,
                      const char* label) {
  const std::size_t m = tab.rows();
  while (true) {
    if (opt.verbosity > 0 && opt.trace) tab.dump(*opt.trace, label);
    std::size_t enter = allowed_cols;
    for (std::size_t j = 0; j < allowed_cols; ++j)
      if (tab.at(m, j) < -opt.pivot_tol) {
        enter = j;
        break;
      }
    if (enter == allowed_cols) return PhaseResult::optimal;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = tab.at(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = tab.rhs(i) / a;
      const double eps = 1e-12 * std::max(1.0, std::fabs(best));
      if (leave == m || ratio < best - eps) {
        best = ratio;
        leave = i;
      } else if (std::fabs(ratio - best) <= eps && tab.basis()[i] < tab.basis()[leave]) {
        best = std::min(best, ratio);
        leave = i;
      }
    }
    if (leave == m) return PhaseResult::unbounded;
    tab.pivot(leave, enter);
    if (++pivots > opt.max_pivots) return PhaseResult::pivot_limit;
  }
}

}  // namespace

LpResult lp_maximize(const LinearProgram& lp, const SimplexOptions& opt) {
  lp.validate();
  const std::size_t n = lp.variables();
  const std::size_t m = lp.constraints.size();

  // Columns: x+ (n), x- (n), surplus (m), artificials (k).
  std::vector<std::size_t> art_row;
  for (std::size_t i = 0; i < m; ++i)
    if (lp.constraints[i].bound > 0.0) art_row.push_back(i);
  const std::size_t n_struct = 2 * n + m;
  const std::size_t n_cols = n_struct + art_row.size();

  Tableau tab(m, n_cols);
  std::size_t next_art = n_struct;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    const double sign = c.bound > 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      tab.at(i, j) = sign * c.coefficients[j];
      tab.at(i, n + j) = -sign * c.coefficients[j];
    }
    tab.at(i, 2 * n + i) = -sign;
    tab.rhs(i) = sign * c.bound;
    if (c.bound > 0.0) {
      tab.at(i, next_art) = 1.0;
      tab.basis()[i] = next_art++;
    } else {
      tab.basis()[i] = 2 * n + i;
    }
  }

  LpResult result;
  if (!art_row.empty()) {
    std::vector<double> cost(n_cols, 0.0);
    for (std::size_t j = n_struct; j < n_cols; ++j) cost[j] = 1.0;
    tab.set_cost(cost);
    const auto ph = run_phase(tab, n_cols, opt, result.pivots, "phase 1");
    if (ph == PhaseResult::pivot_limit) throw NumericalError("lp_maximize: pivot limit reached in phase 1");
    double scale = 1.0;
    for (const auto& c : lp.constraints) scale = std::max(scale, std::fabs(c.bound));
    if (-tab.rhs(tab.rows()) > opt.feasibility_tol * scale) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < tab.rows();) {
      if (tab.basis()[i] < n_struct) {
        ++i;
        continue;
      }
      std::size_t col = n_struct;
      for (std::size_t j = 0; j < n_struct; ++j)
        if (std::fabs(tab.at(i, j)) > opt.pivot_tol) {
          col = j;
          break;
        }
      if (col == n_struct) {
        tab.drop_row(i);
      } else {
        tab.pivot(i, col);
        ++i;
      }
    }
  }

  std::vector<double> cost(n_cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = -lp.objective[j];
    cost[n + j] = lp.objective[j];
  }
  tab.set_cost(cost);
  const auto ph = run_phase(tab, n_struct, opt, result.pivots, "phase 2");
  if (ph == PhaseResult::pivot_limit) throw NumericalError("lp_maximize: pivot limit reached in phase 2");
  if (ph == PhaseResult::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  std::vector<double> z(n_cols, 0.0);
  for (std::size_t i = 0; i < tab.rows(); ++i) z[tab.basis()[i]] = tab.rhs(i);
  result.point.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) result.point[j] = z[j] - z[n + j];
  result.value = lp.value(result.point);
  result.status = LpStatus::optimal;
  return result;
}

}  // namespace bentcert::polytope
