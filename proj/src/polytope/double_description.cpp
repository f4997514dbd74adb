// Double-description vertex enumeration on the homogenized cone
// { (x, t) : a_i . x - b_i t >= 0, t >= 0 }. Adjacency uses the
// combinatorial test on zero sets.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>

#include "bentcert/error.hpp"
#include "bentcert/polytope.hpp"
#include "bentcert/simd/kernels.hpp"

namespace bentcert::polytope {
namespace {

constexpr std::size_t kWords = 4;
constexpr std::size_t kMaxRows = 64 * kWords;

struct ZeroSet {
  std::array<std::uint64_t, kWords> w{};

  void set(std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
  int count() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
  }
  friend ZeroSet operator&(const ZeroSet& a, const ZeroSet& b) {
    ZeroSet r;
    for (std::size_t k = 0; k < kWords; ++k) r.w[k] = a.w[k] & b.w[k];
    return r;
  }
  bool contains(const ZeroSet& sub) const {
    for (std::size_t k = 0; k < kWords; ++k)
      if ((w[k] & sub.w[k]) != sub.w[k]) return false;
    return true;
  }
};

struct Ray {
  std::vector<double> y;
  ZeroSet zero;
};

void normalize(std::vector<double>& y) {
  const double m = simd::max_abs(y);
  if (m > 0.0)
    for (double& v : y) v /= m;
}

// Rank of the given rows (Gaussian elimination with partial pivoting).
int row_rank(std::vector<std::vector<double>> rows, std::size_t n, double tol) {
  int rank = 0;
  std::vector<bool> used(rows.size(), false);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = rows.size();
    double best = tol;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!used[i] && std::fabs(rows[i][col]) > best) {
        best = std::fabs(rows[i][col]);
        piv = i;
      }
    if (piv == rows.size()) continue;
    used[piv] = true;
    ++rank;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == piv) continue;
      const double f = rows[i][col] / rows[piv][col];
      if (f != 0.0)
        for (std::size_t j = col; j < n; ++j) rows[i][j] -= f * rows[piv][j];
    }
  }
  return rank;
}

// Solves the square system A x = b (rows of A given); returns false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::fabs(a[i][col]) > std::fabs(a[piv][col])) piv = i;
    if (std::fabs(a[piv][col]) < 1e-13) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a[i][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
      b[i] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return true;
}

struct Homogenized {
  std::vector<std::vector<double>> rows;  // unit-norm rows over (x, t)
};

Homogenized homogenize(const LinearProgram& lp) {
  const std::size_t n = lp.variables();
  Homogenized h;
  for (const auto& c : lp.constraints) {
    std::vector<double> row(c.coefficients);
    row.push_back(-c.bound);
    const double nrm = std::sqrt(std::inner_product(row.begin(), row.end(), row.begin(), 0.0));
    if (nrm == 0.0) continue;
    for (double& v : row) v /= nrm;
    h.rows.push_back(std::move(row));
  }
  std::vector<double> t_row(n + 1, 0.0);
  t_row[n] = 1.0;
  h.rows.push_back(std::move(t_row));
  return h;
}

std::vector<Ray> double_description(const Homogenized& h, const std::vector<std::size_t>& order, double tol) {
  const std::size_t dim = h.rows.front().size();
  if (h.rows.size() > kMaxRows) throw InvalidInput("enumerate_vertices: too many constraints");

  // Initial simplicial cone from the first dim independent rows in `order`.
  std::vector<std::size_t> basis_rows;
  {
    std::vector<std::vector<double>> reduced;
    for (std::size_t idx : order) {
      std::vector<double> r = h.rows[idx];
      for (const auto& b : reduced) {
        const std::size_t lead = static_cast<std::size_t>(
            std::max_element(b.begin(), b.end(), [](double x, double y) { return std::fabs(x) < std::fabs(y); }) -
            b.begin());
        const double f = r[lead] / b[lead];
        for (std::size_t j = 0; j < dim; ++j) r[j] -= f * b[j];
      }
      if (simd::max_abs(r) > 1e-8) {
        reduced.push_back(std::move(r));
        basis_rows.push_back(idx);
        if (basis_rows.size() == dim) break;
      }
    }
  }
  if (basis_rows.size() < dim)
    throw NumericalError("enumerate_vertices: constraint matrix is rank deficient (region unbounded)");

  std::vector<Ray> rays;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<std::vector<double>> a;
    std::vector<double> rhs(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) a.push_back(h.rows[basis_rows[i]]);
    rhs[k] = 1.0;
    Ray ray;
    if (!solve_square(a, rhs, ray.y)) throw NumericalError("enumerate_vertices: singular initial basis");
    normalize(ray.y);
    for (std::size_t i = 0; i < dim; ++i)
      if (i != k) ray.zero.set(basis_rows[i]);
    rays.push_back(std::move(ray));
  }

  std::vector<bool> in_basis(h.rows.size(), false);
  for (std::size_t b : basis_rows) in_basis[b] = true;
  const auto& kern = simd::active();
  const int need = static_cast<int>(dim) - 2;

  std::vector<double> val;
  for (std::size_t idx : order) {
    if (in_basis[idx]) continue;
    const auto& row = h.rows[idx];
    val.resize(rays.size());
    std::vector<std::size_t> pos, neg;
    std::vector<Ray> next;
    next.reserve(rays.size());
    for (std::size_t r = 0; r < rays.size(); ++r) {
      val[r] = kern.dot(row.data(), rays[r].y.data(), dim);
      if (val[r] > tol)
        pos.push_back(r);
      else if (val[r] < -tol)
        neg.push_back(r);
    }
    if (neg.empty()) {
      for (std::size_t r = 0; r < rays.size(); ++r)
        if (std::fabs(val[r]) <= tol) rays[r].zero.set(idx);
      continue;
    }
    for (std::size_t r = 0; r < rays.size(); ++r) {
      if (val[r] < -tol) continue;
      Ray keep = rays[r];
      if (val[r] <= tol) keep.zero.set(idx);
      next.push_back(std::move(keep));
    }
    for (std::size_t p : pos) {
      for (std::size_t q : neg) {
        const ZeroSet common = rays[p].zero & rays[q].zero;
        if (common.count() < need) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r)
          if (r != p && r != q && rays[r].zero.contains(common)) adjacent = false;
        if (!adjacent) continue;
        Ray nr;
        nr.y.resize(dim);
        kern.axpby(val[p], rays[q].y.data(), -val[q], rays[p].y.data(), nr.y.data(), dim);
        normalize(nr.y);
        nr.zero = common;
        nr.zero.set(idx);
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
  }
  return rays;
}

std::vector<Vertex> extract_vertices(const LinearProgram& lp, const std::vector<Ray>& rays,
                                     const EnumerationOptions& opt) {
  const std::size_t n = lp.variables();
  std::vector<std::vector<double>> points;
  for (const auto& ray : rays) {
    const double t = ray.y[n];
    if (t <= opt.tol) throw NumericalError("enumerate_vertices: region is unbounded");
    std::vector<double> x(ray.y.begin(), ray.y.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& v : x) v /= t;
    points.push_back(std::move(x));
  }

  std::vector<Vertex> out;
  for (const auto& x : points) out.push_back(polish_vertex(lp, x, opt.tol));
  return out;
}

}  // namespace

Vertex polish_vertex(const LinearProgram& lp, const std::vector<double>& approx, double tol) {
  const std::size_t n = lp.variables();
  if (approx.size() != n) throw InvalidInput("polish_vertex: point has the wrong dimension");
  Vertex v;
  v.point = approx;
  std::vector<std::vector<double>> active_rows;
  std::vector<double> active_rhs;
  for (const auto& c : lp.constraints) {
    const double nrm = std::sqrt(std::inner_product(c.coefficients.begin(), c.coefficients.end(),
                                                    c.coefficients.begin(), 0.0) +
                                 c.bound * c.bound);
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += c.coefficients[j] * approx[j];
    if (std::fabs(lhs - c.bound) <= tol * std::max(1.0, nrm)) {
      active_rows.push_back(c.coefficients);
      active_rhs.push_back(c.bound);
    }
  }
  v.active = static_cast<int>(active_rows.size());
  v.active_rank = row_rank(active_rows, n, 1e-9);
  v.flagged = v.active_rank < static_cast<int>(n);
  if (v.flagged) return v;
  // Re-solve on n independent tight rows.
  std::vector<std::vector<double>> sq;
  std::vector<double> sq_rhs;
  for (std::size_t i = 0; i < active_rows.size() && sq.size() < n; ++i) {
    auto trial = sq;
    trial.push_back(active_rows[i]);
    if (row_rank(trial, n, 1e-9) == static_cast<int>(trial.size())) {
      sq = std::move(trial);
      sq_rhs.push_back(active_rhs[i]);
    }
  }
  std::vector<double> polished;
  if (solve_square(sq, sq_rhs, polished)) {
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift = std::max(shift, std::fabs(polished[j] - approx[j]));
    if (shift <= std::max(1e-7, 100.0 * tol)) v.point = std::move(polished);
  }
  return v;
}

std::vector<std::size_t> equivalence_classes(const std::vector<std::vector<double>>& points, double tol) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  const std::size_t dim = points.front().size();
  // Single-linkage clusters per coordinate (gap <= tol); two points are
  // equivalent when every coordinate falls in the same cluster. Unlike a
  // sorted sweep this is insensitive to rounding noise in leading coordinates.
  std::vector<std::uint32_t> ids(n * dim);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < dim; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a][j] < points[b][j]; });
    std::uint32_t id = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && points[order[k]][j] - points[order[k - 1]][j] > tol) ++id;
      ids[order[k] * dim + j] = id;
    }
  }
  auto key = [&](std::size_t i) { return std::span<const std::uint32_t>(ids.data() + i * dim, dim); };
  auto same = [&](std::size_t a, std::size_t b) { return std::ranges::equal(key(a), key(b)); };
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (!same(a, b)) return std::ranges::lexicographical_compare(key(a), key(b));
    return points[a] < points[b];
  });
  std::vector<std::size_t> reps;  // smallest member of each class
  std::vector<std::size_t> provisional(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || !same(order[k], order[k - 1])) reps.push_back(order[k]);
    provisional[order[k]] = reps.size() - 1;
  }
  std::vector<std::size_t> rank(reps.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return points[reps[a]] < points[reps[b]]; });
  std::vector<std::size_t> relabel(reps.size());
  for (std::size_t k = 0; k < rank.size(); ++k) relabel[rank[k]] = k;
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = relabel[provisional[i]];
  return label;
}

namespace {

// Index of the lexicographically smallest member of each class, in class order.
std::vector<std::size_t> representatives(const std::vector<std::vector<double>>& points, double tol) {
  const auto label = equivalence_classes(points, tol);
  std::size_t classes = 0;
  for (std::size_t l : label) classes = std::max(classes, l + 1);
  std::vector<std::size_t> rep(classes, points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    if (rep[label[i]] == points.size() || points[i] < points[rep[label[i]]]) rep[label[i]] = i;
  return rep;
}

}  // namespace

std::vector<std::vector<double>> deduplicate(std::vector<std::vector<double>> points, double tol) {
  std::vector<std::vector<double>> kept;
  for (std::size_t i : representatives(points, tol)) kept.push_back(std::move(points[i]));
  return kept;
}

std::vector<Vertex> enumerate_vertices(const LinearProgram& lp, const EnumerationOptions& opt) {
  lp.validate();
  const Homogenized h = homogenize(lp);
  std::vector<std::size_t> order(h.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  switch (opt.order) {
    case InsertionOrder::given:
      // The t >= 0 row first, then the constraints as listed.
      std::rotate(order.rbegin(), order.rbegin() + 1, order.rend());
      break;
    case InsertionOrder::reversed:
      std::reverse(order.begin(), order.end());
      break;
    case InsertionOrder::lexmin:
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return h.rows[a] < h.rows[b]; });
      break;
  }

  auto run = [&](const std::vector<std::size_t>& ord) {
    auto verts = extract_vertices(lp, double_description(h, ord, opt.tol), opt);
    std::vector<std::vector<double>> pts;
    for (const auto& v : verts) pts.push_back(v.point);
    std::vector<Vertex> out;
    for (std::size_t i : representatives(pts, opt.dedup_tol)) out.push_back(std::move(verts[i]));
    return out;
  };

  auto verts = run(order);
  const bool any_flagged = std::any_of(verts.begin(), verts.end(), [](const Vertex& v) { return v.flagged; });
  if (any_flagged) {
    // Perturbation fallback: a different insertion order changes which
    // near-degenerate combinations are formed.
    std::vector<std::size_t> alt(order.rbegin(), order.rend());
    auto retry = run(alt);
    const bool retry_flagged =
        std::any_of(retry.begin(), retry.end(), [](const Vertex& v) { return v.flagged; });
    if (!retry_flagged) return retry;
  }
  return verts;
}

std::vector<Vertex> optimal_face_vertices(const LinearProgram& lp, double value, double tol,
                                          const EnumerationOptions& opt) {
  lp.validate();
  LinearProgram cut = lp;
  // A looser cut keeps every face vertex while trimming the search; the
  // artificial vertices on the cut plane fall below value - tol.
  cut.constraints.push_back({lp.objective, value - 10.0 * tol});
  auto verts = enumerate_vertices(cut, opt);
  std::vector<Vertex> out;
  for (auto& v : verts) {
    if (lp.value(v.point) < value - tol) continue;
    // Activity against the original constraints only.
    v = polish_vertex(lp, v.point, opt.tol);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace bentcert::polytope
