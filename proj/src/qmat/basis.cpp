#include <cmath>

#include "bentcert/qmat.hpp"

namespace bentcert::qmat {

std::string to_string(BasisKind kind) {
  return kind == BasisKind::gellmann ? "gellmann" : "pauli-tensor-quarter";
}

namespace {

std::vector<CMatrix> pauli() {
  CMatrix s0 = CMatrix::identity(2);
  CMatrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1(0, 1) = s1(1, 0) = 1.0;
  s2(0, 1) = cplx(0.0, -1.0);
  s2(1, 0) = cplx(0.0, 1.0);
  s3(0, 0) = 1.0;
  s3(1, 1) = -1.0;
  return {s0, s1, s2, s3};
}

std::vector<CMatrix> gellmann(int d) {
  const auto n = static_cast<std::size_t>(d);
  std::vector<CMatrix> g;
  g.reserve(n * n);
  g.push_back(CMatrix::identity(n) * cplx(1.0 / std::sqrt(static_cast<double>(d))));
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      CMatrix x(n, n), y(n, n);
      x(j, k) = x(k, j) = h;
      y(j, k) = cplx(0.0, -h);
      y(k, j) = cplx(0.0, h);
      g.push_back(std::move(x));
      g.push_back(std::move(y));
    }
  for (std::size_t l = 1; l < n; ++l) {
    CMatrix z(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t m = 0; m < l; ++m) z(m, m) = norm;
    z(l, l) = -static_cast<double>(l) * norm;
    g.push_back(std::move(z));
  }
  return g;
}

}  // namespace

OperatorBasis operator_basis(int d, BasisKind kind) {
  if (kind == BasisKind::gellmann) {
    if (d < 2) throw InvalidInput("operator_basis: Gell-Mann basis needs d >= 2");
    return {kind, d, gellmann(d)};
  }
  if (d != 4) throw InvalidInput("operator_basis: pauli-tensor-quarter basis exists only for d = 4");
  const auto s = pauli();
  OperatorBasis b{kind, d, {}};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) b.elements.push_back(kron(s[mu], s[nu]) * cplx(0.5));
  return b;
}

std::vector<double> expand(const OperatorBasis& basis, const CMatrix& h) {
  std::vector<double> c;
  c.reserve(basis.elements.size());
  for (const auto& g : basis.elements) c.push_back(hs_inner(g, h).real());
  return c;
}

CMatrix reconstruct(const OperatorBasis& basis, std::span<const double> coefficients) {
  if (coefficients.size() != basis.elements.size())
    throw InvalidInput("reconstruct: coefficient count differs from basis size");
  const auto n = static_cast<std::size_t>(basis.dim);
  CMatrix h(n, n);
  for (std::size_t k = 0; k < coefficients.size(); ++k) h += basis.elements[k] * cplx(coefficients[k]);
  return h;
}

}  // namespace bentcert::qmat
