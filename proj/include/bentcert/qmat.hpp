#pragma once

// Dense Hermitian linear algebra on bipartite operators: spectra, singular
// values, the partial transpose and the realignment map.

#include <span>
#include <string>
#include <vector>

#include "bentcert/matrix.hpp"

namespace bentcert::qmat {

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double orthonormal = 1e-12;
inline constexpr double eigen_residual = 1e-10;
inline constexpr double rank_cutoff = 1e-7;
inline constexpr double state_trace = 1e-12;
inline constexpr double state_min_eigenvalue = -1e-10;
}  // namespace tol

/// Operator on C^dA (x) C^dB, rows and columns indexed by i*dB + j for |i>_A|j>_B.
class BipartiteOperator {
 public:
  BipartiteOperator(int dA, int dB, CMatrix entries);

  int dA() const noexcept { return dA_; }
  int dB() const noexcept { return dB_; }
  int dim() const noexcept { return dA_ * dB_; }
  const CMatrix& entries() const noexcept { return entries_; }

  cplx operator()(int i, int j) const { return entries_(i, j); }

  static BipartiteOperator identity(int dA, int dB);
  static BipartiteOperator maximally_mixed(int dA, int dB);

  friend BipartiteOperator operator+(const BipartiteOperator& a, const BipartiteOperator& b);
  friend BipartiteOperator operator-(const BipartiteOperator& a, const BipartiteOperator& b);
  friend BipartiteOperator operator*(double s, const BipartiteOperator& a);

 private:
  int dA_;
  int dB_;
  CMatrix entries_;
};

bool is_hermitian(const CMatrix& h, double tolerance = tol::hermitian);

/// Throws InvalidInput unless rho is Hermitian with unit trace and
/// lambda_min >= -1e-10.
void require_state(const BipartiteOperator& rho);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column k belongs to values[k]
};

/// Cyclic Jacobi. Throws InvalidInput (with the measured asymmetry) for
/// non-Hermitian input.
HermitianEigen eig_hermitian(const CMatrix& h);
HermitianEigen eig_hermitian(const BipartiteOperator& h);
std::vector<double> eigenvalues(const CMatrix& h);
double min_eigenvalue(const CMatrix& h);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  RMatrix vectors;             // columns
};

/// Real symmetric cyclic Jacobi; rotations run through the SIMD kernels.
SymmetricEigen eig_symmetric(const RMatrix& a);
std::vector<double> eigenvalues(const RMatrix& a);

struct Svd {
  CMatrix u;              // rows x k
  std::vector<double> s;  // descending, k = min(rows, cols)
  CMatrix v;              // cols x k;  A = U diag(s) V^dagger
};

/// One-sided (Hestenes) Jacobi SVD.
Svd svd(const CMatrix& a);
std::vector<double> singular_values(const CMatrix& a);

/// Sum of singular values.
double trace_norm(const CMatrix& a);

/// Transposes the B factor: [(i,j),(k,l)] -> [(i,l),(k,j)].
BipartiteOperator partial_transpose(const BipartiteOperator& h);

/// Index reshuffle R[(i,k),(j,l)] = H[(i,j),(k,l)]; shape dA^2 x dB^2.
CMatrix realign(const BipartiteOperator& h);
BipartiteOperator realign_inverse(const CMatrix& r, int dA, int dB);

/// Number of eigenvalues above cutoff.
int rank(const CMatrix& h, double cutoff = tol::rank_cutoff);

enum class BasisKind { gellmann, pauli_tensor_quarter };

std::string to_string(BasisKind kind);

/// Hilbert-Schmidt orthonormal Hermitian basis; element 0 is identity/sqrt(d).
struct OperatorBasis {
  BasisKind kind;
  int dim;
  std::vector<CMatrix> elements;
};

/// gellmann: generalized Gell-Mann for any d >= 2.
/// pauli_tensor_quarter: (sigma_mu (x) sigma_nu)/2 for d = 4, (mu,nu) lexicographic.
OperatorBasis operator_basis(int d, BasisKind kind);

/// Coefficients tr(g_k H).
std::vector<double> expand(const OperatorBasis& basis, const CMatrix& h);
CMatrix reconstruct(const OperatorBasis& basis, std::span<const double> coefficients);

}  // namespace bentcert::qmat
