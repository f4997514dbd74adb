#include "bentcert/criteria.hpp"

#include <cmath>
#include <sstream>

namespace bentcert::criteria {

using qmat::tol::state_min_eigenvalue;

RadiusReport make_radius_report(int d, double lambda_min_rho, double lambda_min_pt, double ccnr) {
  RadiusReport rep;
  rep.lambda_min_rho = lambda_min_rho;
  rep.lambda_min_pt = lambda_min_pt;
  rep.ccnr = ccnr;
  const double dd = static_cast<double>(d);
  rep.r_a = std::sqrt(dd / (dd - 1.0)) * lambda_min_pt;
  rep.r_b = (ccnr - 1.0) / std::sqrt(dd);
  if (rep.r_a > 0.0 && rep.r_b > 0.0 && lambda_min_rho >= state_min_eigenvalue)
    rep.r = std::min(rep.r_a, rep.r_b);
  return rep;
}

RadiusReport ball_radius(const BipartiteOperator& rho) {
  const CMatrix& m = rho.entries();
  const double asym = max_hermitian_asymmetry(m);
  if (asym > qmat::tol::hermitian) {
    std::ostringstream msg;
    msg << "ball_radius: input is not Hermitian (asymmetry " << asym << ")";
    throw InvalidInput(msg.str());
  }
  if (std::abs(m.trace() - 1.0) > qmat::tol::state_trace) {
    std::ostringstream msg;
    msg << "ball_radius: input trace " << m.trace().real() << " is not 1";
    throw InvalidInput(msg.str());
  }
  return make_radius_report(rho.dim(), qmat::min_eigenvalue(m),
                            qmat::min_eigenvalue(qmat::partial_transpose(rho).entries()),
                            qmat::trace_norm(qmat::realign(rho)));
}

BipartiteOperator extremal_inf_direction(int dA, int dB) {
  const int d = dA * dB;
  if (d < 2) throw InvalidInput("extremal_inf_direction: d must be at least 2");
  const double x = std::sqrt((d - 1.0) / d);
  const double z = -x / (d - 1.0);
  CMatrix m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  m(0, 0) = x;
  for (int i = 1; i < d; ++i) m(i, i) = z;
  return {dA, dB, std::move(m)};
}

BipartiteOperator extremal_inf_direction(int d) { return extremal_inf_direction(d, 1); }

BipartiteOperator extremal_realign_direction(int dA) {
  if (dA < 2) throw InvalidInput("extremal_realign_direction: dA must be at least 2");
  const auto basis = qmat::operator_basis(dA, qmat::BasisKind::gellmann);
  const std::size_t n = basis.elements.size();  // dA^2 = d
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  const auto d = static_cast<std::size_t>(dA * dA);
  CMatrix x(d, d);
  // Coefficient matrix w * J (J the anti-diagonal of ones) on g_k (x) g_l.
  // The (0,0) entry is zero, hence X is traceless.
  for (std::size_t k = 0; k < n; ++k) x += kron(basis.elements[k], basis.elements[n - 1 - k]) * cplx(w);
  return {dA, dA, std::move(x)};
}

BipartiteOperator unit_traceless(const BipartiteOperator& x) {
  const double d = x.dim();
  CMatrix m = x.entries();
  const cplx shift = m.trace() / d;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= shift;
  const double xi = hs_norm(m);
  if (xi == 0.0) throw InvalidInput("unit_traceless: operator is proportional to the identity");
  m *= cplx(1.0 / xi);
  return {x.dA(), x.dB(), std::move(m)};
}

BipartiteOperator probe_direction(const BipartiteOperator& rho, ProbeDirection direction,
                                  int* degeneracy) {
  if (direction == ProbeDirection::ppt) {
    const auto pt = qmat::partial_transpose(rho);
    const auto eig = qmat::eig_hermitian(pt);
    int mult = 0;
    for (double v : eig.values)
      if (v - eig.values.front() <= 1e-9) ++mult;
    if (degeneracy) *degeneracy = mult;
    const std::size_t n = eig.vectors.rows();
    std::vector<cplx> eta(n);
    for (std::size_t r = 0; r < n; ++r) eta[r] = eig.vectors(r, 0);
    // Gamma is an involution, so Gamma^{-1} = Gamma.
    const BipartiteOperator proj(rho.dA(), rho.dB(), outer(eta, eta));
    return unit_traceless(qmat::partial_transpose(proj));
  }
  if (degeneracy) *degeneracy = 0;
  const auto s = qmat::svd(qmat::realign(rho));
  const CMatrix uv = s.u * s.v.adjoint();
  return unit_traceless(qmat::realign_inverse(uv, rho.dA(), rho.dB()));
}

ProbeResult probe_boundary(const BipartiteOperator& rho, double r, ProbeDirection direction) {
  if (r < 0.0) throw InvalidInput("probe_boundary: r must be nonnegative");
  qmat::require_state(rho);
  ProbeResult out;
  const auto shift = probe_direction(rho, direction, &out.degeneracy);
  const BipartiteOperator moved = rho - r * shift;
  out.lambda_min_pt = qmat::min_eigenvalue(qmat::partial_transpose(moved).entries());
  out.ccnr = qmat::trace_norm(qmat::realign(moved));
  out.lambda_min_rho = qmat::min_eigenvalue(moved.entries());
  return out;
}

}  // namespace bentcert::criteria
