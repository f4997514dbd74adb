#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bentcert/qmat.hpp"
#include "bentcert/simd/kernels.hpp"

namespace bentcert::qmat {
namespace {

constexpr int kMaxSweeps = 100;

// Rotation parameters that annihilate the off-diagonal entry of the
// Hermitian 2x2 block [[app, |b|], [|b|, aqq]] (after phase removal).
struct Rotation {
  double c;
  double s;
  double t;
};

Rotation jacobi_rotation(double app, double aqq, double abs_b) {
  const double zeta = (aqq - app) / (2.0 * abs_b);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {c, t * c, t};
}

std::vector<std::size_t> ascending_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

HermitianEigen eig_hermitian(const CMatrix& h) {
  if (!h.square()) throw InvalidInput("eig_hermitian: matrix is not square");
  const double asym = max_hermitian_asymmetry(h);
  const double scale = std::max(1.0, hs_norm(h));
  if (asym > tol::hermitian * scale) {
    std::ostringstream msg;
    msg << "eig_hermitian: matrix is not Hermitian (max |A_ij - conj(A_ji)| = " << asym << ")";
    throw InvalidInput(msg.str());
  }
  const std::size_t n = h.rows();
  CMatrix a = h;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  CMatrix v = CMatrix::identity(n);

  const double frob = hs_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= 1e-17 * frob || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        const double abs_b = std::abs(b);
        if (abs_b == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (sweep > 3 && abs_b < 1e-18 * (std::fabs(app) + std::fabs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const cplx e = b / abs_b;
        const cplx ebar = std::conj(e);
        const auto [c, s, t] = jacobi_rotation(app, aqq, abs_b);
        // A <- A G with G = [[c, s], [-s ebar, c ebar]] on (p, q).
        for (std::size_t r = 0; r < n; ++r) {
          const cplx arp = a(r, p);
          const cplx arq = a(r, q);
          a(r, p) = c * arp - s * ebar * arq;
          a(r, q) = s * arp + c * ebar * arq;
        }
        // A <- G^dagger A.
        for (std::size_t r = 0; r < n; ++r) {
          const cplx apr = a(p, r);
          const cplx aqr = a(q, r);
          a(p, r) = c * apr - s * e * aqr;
          a(q, r) = s * apr + c * e * aqr;
        }
        a(p, p) = app - t * abs_b;
        a(q, q) = aqq + t * abs_b;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const cplx vrp = v(r, p);
          const cplx vrq = v(r, q);
          v(r, p) = c * vrp - s * ebar * vrq;
          v(r, q) = s * vrp + c * ebar * vrq;
        }
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  const auto order = ascending_order(diag);
  HermitianEigen out{std::vector<double>(n), CMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

std::vector<double> eigenvalues(const CMatrix& h) { return eig_hermitian(h).values; }

double min_eigenvalue(const CMatrix& h) { return eig_hermitian(h).values.front(); }

SymmetricEigen eig_symmetric(const RMatrix& input) {
  if (!input.square()) throw InvalidInput("eig_symmetric: matrix is not square");
  const std::size_t n = input.rows();
  RMatrix a = input;
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = avg;
    }
  if (asym > tol::hermitian * std::max(1.0, hs_norm(input))) {
    std::ostringstream msg;
    msg << "eig_symmetric: matrix is not symmetric (max asymmetry " << asym << ")";
    throw InvalidInput(msg.str());
  }
  // Rows of vt are eigenvectors, so every rotation touches contiguous memory.
  RMatrix vt = RMatrix::identity(n);
  const auto& k = simd::active();

  const double frob = hs_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const auto row = a.row(p);
      off += k.dot(row.data() + p + 1, row.data() + p + 1, n - p - 1);
    }
    if (std::sqrt(2.0 * off) <= 1e-17 * frob || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double b = a(p, q);
        if (b == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (sweep > 3 && std::fabs(b) < 1e-18 * (std::fabs(app) + std::fabs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        // Sign of b folds into the rotation: use |b| and flip s.
        const double sign = b > 0.0 ? 1.0 : -1.0;
        const auto [c, s0, t] = jacobi_rotation(app, aqq, std::fabs(b));
        const double s = sign * s0;
        k.rot(a.row(p).data(), a.row(q).data(), n, c, s);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(r, p) = a(p, r);
          a(r, q) = a(q, r);
        }
        a(p, p) = app - t * std::fabs(b);
        a(q, q) = aqq + t * std::fabs(b);
        a(p, q) = a(q, p) = 0.0;
        k.rot(vt.row(p).data(), vt.row(q).data(), n, c, s);
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = ascending_order(diag);
  SymmetricEigen out{std::vector<double>(n), RMatrix(n, n)};
  for (std::size_t col = 0; col < n; ++col) {
    out.values[col] = diag[order[col]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = vt(order[col], r);
  }
  return out;
}

std::vector<double> eigenvalues(const RMatrix& a) { return eig_symmetric(a).values; }

namespace {

// Columns of `work` (stored as rows, i.e. work = A^T) are rotated pairwise
// until mutually orthogonal.
Svd svd_tall(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  CMatrix cols = a.transpose();          // row j = column j of A
  CMatrix vcols = CMatrix::identity(n);  // row j = column j of V

  auto col_dot = [&](std::size_t p, std::size_t q) {
    cplx acc{};
    for (std::size_t r = 0; r < m; ++r) acc += std::conj(cols(p, r)) * cols(q, r);
    return acc;
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = col_dot(p, p).real();
        const double beta = col_dot(q, q).real();
        const cplx gamma = col_dot(p, q);
        const double abs_g = std::abs(gamma);
        if (abs_g == 0.0 || abs_g <= 1e-16 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx ebar = std::conj(gamma / abs_g);
        const auto [c, s, t] = jacobi_rotation(alpha, beta, abs_g);
        (void)t;
        for (std::size_t r = 0; r < m; ++r) {
          const cplx xp = cols(p, r);
          const cplx xq = cols(q, r);
          cols(p, r) = c * xp - s * ebar * xq;
          cols(q, r) = s * xp + c * ebar * xq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx vp = vcols(p, r);
          const cplx vq = vcols(q, r);
          vcols(p, r) = c * vp - s * ebar * vq;
          vcols(q, r) = s * vp + c * ebar * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(col_dot(j, j).real());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{CMatrix(m, n), std::vector<double>(n), CMatrix(n, n)};
  const double cutoff = (sigma.empty() ? 0.0 : sigma[order[0]]) * 1e-14;
  std::vector<bool> filled(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.s[k] = sigma[j];
    for (std::size_t r = 0; r < n; ++r) out.v(r, k) = vcols(j, r);
    if (sigma[j] > cutoff && sigma[j] > 0.0) {
      for (std::size_t r = 0; r < m; ++r) out.u(r, k) = cols(j, r) / sigma[j];
      filled[k] = true;
    }
  }
  // Complete U for (numerically) zero singular values by Gram-Schmidt
  // against the standard basis, with one re-orthogonalization pass.
  std::size_t probe = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (filled[k]) continue;
    while (probe < m) {
      std::vector<cplx> cand(m, 0.0);
      cand[probe++] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t o = 0; o < n; ++o) {
          if (!filled[o]) continue;
          cplx proj{};
          for (std::size_t r = 0; r < m; ++r) proj += std::conj(out.u(r, o)) * cand[r];
          for (std::size_t r = 0; r < m; ++r) cand[r] -= proj * out.u(r, o);
        }
      double nrm = 0.0;
      for (const cplx& x : cand) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      if (nrm > 1e-6) {
        for (std::size_t r = 0; r < m; ++r) out.u(r, k) = cand[r] / nrm;
        filled[k] = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace

Svd svd(const CMatrix& a) {
  if (a.rows() >= a.cols()) return svd_tall(a);
  Svd t = svd_tall(a.adjoint());
  return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
}

std::vector<double> singular_values(const CMatrix& a) { return svd(a).s; }

double trace_norm(const CMatrix& a) {
  const auto s = singular_values(a);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

int rank(const CMatrix& h, double cutoff) {
  const auto ev = eigenvalues(h);
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > cutoff; }));
}

}  // namespace bentcert::qmat
