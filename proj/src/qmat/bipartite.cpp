#include <cmath>
#include <sstream>

#include "bentcert/qmat.hpp"

namespace bentcert::qmat {

BipartiteOperator::BipartiteOperator(int dA, int dB, CMatrix entries)
    : dA_(dA), dB_(dB), entries_(std::move(entries)) {
  if (dA < 1 || dB < 1) throw InvalidInput("bipartite operator: local dimensions must be positive");
  const auto d = static_cast<std::size_t>(dA) * static_cast<std::size_t>(dB);
  if (entries_.rows() != d || entries_.cols() != d) {
    std::ostringstream msg;
    msg << "bipartite operator: expected " << d << "x" << d << " entries, got " << entries_.rows()
        << "x" << entries_.cols();
    throw InvalidInput(msg.str());
  }
}

BipartiteOperator BipartiteOperator::identity(int dA, int dB) {
  return {dA, dB, CMatrix::identity(static_cast<std::size_t>(dA * dB))};
}

BipartiteOperator BipartiteOperator::maximally_mixed(int dA, int dB) {
  return (1.0 / (dA * dB)) * identity(dA, dB);
}

BipartiteOperator operator+(const BipartiteOperator& a, const BipartiteOperator& b) {
  if (a.dA_ != b.dA_ || a.dB_ != b.dB_) throw InvalidInput("operator sum: local dimensions differ");
  return {a.dA_, a.dB_, a.entries_ + b.entries_};
}

BipartiteOperator operator-(const BipartiteOperator& a, const BipartiteOperator& b) {
  if (a.dA_ != b.dA_ || a.dB_ != b.dB_) throw InvalidInput("operator difference: local dimensions differ");
  return {a.dA_, a.dB_, a.entries_ - b.entries_};
}

BipartiteOperator operator*(double s, const BipartiteOperator& a) {
  return {a.dA_, a.dB_, a.entries_ * cplx(s)};
}

bool is_hermitian(const CMatrix& h, double tolerance) {
  return h.square() && max_hermitian_asymmetry(h) <= tolerance;
}

void require_state(const BipartiteOperator& rho) {
  const CMatrix& m = rho.entries();
  const double asym = max_hermitian_asymmetry(m);
  if (asym > tol::hermitian) {
    std::ostringstream msg;
    msg << "not a state: asymmetry " << asym << " exceeds " << tol::hermitian;
    throw InvalidInput(msg.str());
  }
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > tol::state_trace) {
    std::ostringstream msg;
    msg << "not a state: trace " << tr.real() << " differs from 1";
    throw InvalidInput(msg.str());
  }
  const double lmin = min_eigenvalue(m);
  if (lmin < tol::state_min_eigenvalue) {
    std::ostringstream msg;
    msg << "not a state: minimal eigenvalue " << lmin;
    throw InvalidInput(msg.str());
  }
}

HermitianEigen eig_hermitian(const BipartiteOperator& h) { return eig_hermitian(h.entries()); }

BipartiteOperator partial_transpose(const BipartiteOperator& h) {
  const int dA = h.dA();
  const int dB = h.dB();
  CMatrix out(h.entries().rows(), h.entries().cols());
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j)
      for (int k = 0; k < dA; ++k)
        for (int l = 0; l < dB; ++l) out(i * dB + l, k * dB + j) = h(i * dB + j, k * dB + l);
  return {dA, dB, std::move(out)};
}

CMatrix realign(const BipartiteOperator& h) {
  const int dA = h.dA();
  const int dB = h.dB();
  CMatrix out(static_cast<std::size_t>(dA * dA), static_cast<std::size_t>(dB * dB));
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j)
      for (int k = 0; k < dA; ++k)
        for (int l = 0; l < dB; ++l) out(i * dA + k, j * dB + l) = h(i * dB + j, k * dB + l);
  return out;
}

BipartiteOperator realign_inverse(const CMatrix& r, int dA, int dB) {
  if (r.rows() != static_cast<std::size_t>(dA * dA) || r.cols() != static_cast<std::size_t>(dB * dB))
    throw InvalidInput("realign_inverse: shape does not match dA^2 x dB^2");
  CMatrix out(static_cast<std::size_t>(dA * dB), static_cast<std::size_t>(dA * dB));
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j)
      for (int k = 0; k < dA; ++k)
        for (int l = 0; l < dB; ++l) out(i * dB + j, k * dB + l) = r(i * dA + k, j * dB + l);
  return {dA, dB, std::move(out)};
}

}  // namespace bentcert::qmat
