#pragma once

#include <cmath>
#include <random>

#include "bentcert/qmat.hpp"

namespace testing {

using bentcert::CMatrix;
using bentcert::cplx;
using bentcert::qmat::BipartiteOperator;

inline CMatrix random_hermitian(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  CMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    h(i, i) = g(rng);
    for (std::size_t j = i + 1; j < d; ++j) {
      h(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

inline CMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

// Traceless, unit Hilbert-Schmidt norm.
inline BipartiteOperator random_direction(std::mt19937_64& rng, int dA, int dB) {
  const auto d = static_cast<std::size_t>(dA * dB);
  CMatrix h = random_hermitian(rng, d);
  const cplx shift = h.trace() / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) h(i, i) -= shift;
  h *= cplx(1.0 / bentcert::hs_norm(h));
  return {dA, dB, std::move(h)};
}

// Haar-ish unitary: eigenvectors of a random Hermitian matrix.
inline CMatrix random_unitary(std::mt19937_64& rng, std::size_t d) {
  return bentcert::qmat::eig_hermitian(random_hermitian(rng, d)).vectors;
}

// rho = G G^dagger / tr, full rank with probability one.
inline BipartiteOperator random_state(std::mt19937_64& rng, int dA, int dB) {
  const auto d = static_cast<std::size_t>(dA * dB);
  const CMatrix g = random_matrix(rng, d, d);
  CMatrix rho = g * g.adjoint();
  rho *= cplx(1.0 / rho.trace().real());
  return {dA, dB, std::move(rho)};
}

}  // namespace testing
