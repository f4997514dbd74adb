#pragma once

// Two parametrized state families: the two-qutrit family mixing the maximally
// entangled state with two shifted classical sectors, and the Bloch-diagonal
// two-ququart family sum_k x_k g_k (x) g_k with g_k = (sigma_mu (x) sigma_nu)/2.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "bentcert/criteria.hpp"
#include "bentcert/polytope.hpp"
#include "bentcert/qmat.hpp"

namespace bentcert::families {

using qmat::BipartiteOperator;

// ---------------------------------------------------------------- qutrits

/// rho = a |phi3><phi3| + b sum_k |k,k+1><k,k+1| + c sum_k |k,k+2><k,k+2|.
struct QutritParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// c eliminated by a + 3(b + c) = 1.
QutritParams qutrit_params(double a, double b);

/// Throws InvalidInput for negative entries or a + 3(b+c) != 1 (1e-12).
void validate(const QutritParams& p);

BipartiteOperator qutrit_state(const QutritParams& p);

/// Closed form min{a/3, (1 - a - sqrt(4a^2 + 9(b-c)^2))/6}.
double qutrit_pt_min_eig(const QutritParams& p);

/// Closed form 1/3 + 2a + 2 sqrt(3(b^2 + c^2 + bc) - (b + c) + 1/9).
double qutrit_ccnr(const QutritParams& p);

/// Radius report from the closed forms (lambda_min(rho) = min(a, b, c)).
criteria::RadiusReport qutrit_radius(const QutritParams& p);

struct QutritOptimum {
  QutritParams params;  // canonical: b <= c
  double r = 0.0;
  double r_a = 0.0;
  double r_b = 0.0;
  int starts = 0;
  int evaluations = 0;
  bool refined = false;  // the r_a = r_b line search improved the simplex result
};

/// Multi-start Nelder-Mead over (a, b), then a line search along r_a = r_b.
QutritOptimum optimize_qutrit(double tolerance = 1e-8);

/// Same objective restricted to a = 2/7 (b + c = 5/21).
QutritOptimum optimize_qutrit_horodecki(double tolerance = 1e-10);

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimizes f from x0 with an axis-aligned initial simplex of size `step`.
/// Stops when the simplex diameter is below xtol and the value spread below ftol.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double step, double xtol, double ftol,
                             int max_evaluations = 20000);

// ---------------------------------------------------------------- ququarts

inline constexpr int kBloch = 16;

/// x[0] = 1/4 is fixed by normalization; x[k] multiplies g_k (x) g_k, with k
/// the lexicographic index of (mu, nu), 0-based here.
struct BlochCoeffs {
  std::array<double, kBloch> x{};

  static BlochCoeffs from_tail(std::span<const double> tail);  // x[1..15]
  std::array<double, kBloch - 1> tail() const;
};

BipartiteOperator bloch_state(const BlochCoeffs& x);

struct SignStructure {
  // Row j: eigenvalue j of rho equals (1/4) sum_k M[j][k] x[k+1] + 1/16.
  std::array<std::array<int, kBloch - 1>, kBloch> M{};
  // x -> D x realizes the partial transpose.
  std::array<int, kBloch - 1> D{};
  // Common eigenbasis (columns) of the g_k (x) g_k, row j of M <-> column j.
  CMatrix eigenbasis;
};

/// Derived once by diagonalizing a generic combination of the g_k (x) g_k,
/// rounded to +-1 and re-verified; thread-safe.
const SignStructure& sign_structure();

/// (1/4) M x + 1/16, unsorted (eigenbasis order).
std::array<double, kBloch> bloch_eigenvalues(const BlochCoeffs& x);

/// Eigenvalues of the partial transpose: bloch_eigenvalues(D x).
std::array<double, kBloch> bloch_pt_eigenvalues(const BlochCoeffs& x);

/// Radius report from the linear forms; ccnr = sum_k |x_k|.
criteria::RadiusReport bloch_radius(const BlochCoeffs& x);

/// Number of eigenvalues above cutoff, from the linear form.
int bloch_rank(const BlochCoeffs& x, double cutoff = qmat::tol::rank_cutoff);

struct SymmetricOptimum {
  double s_star = 0.0;
  double r_star = 0.0;
  BlochCoeffs example;
};

/// |x_k| = s for k >= 2 and the sign set {2,3,4,5,6,7,9,10,12,14} (1-based).
SymmetricOptimum optimize_ququart_symmetric();

/// Reference rank-10 optimum. Its coefficients carry 7 digits, which
/// leaves lambda_min(rho) around -1e-8; with `snapped` they are moved onto the
/// orthant-polytope vertex they round.
BlochCoeffs rank10_example(bool snapped = true);

/// Reference rank-9 positive-radius state, 7-digit coefficients as given.
BlochCoeffs rank9_example();

/// The vertex of orthant_lp(sign pattern of x) whose tight constraints (at
/// tolerance tol, with r = min(r_a, r_b)) determine it. Throws NumericalError
/// when those constraints do not pin down a point.
BlochCoeffs snap_to_vertex(const BlochCoeffs& approx, double tol = 1e-6);

/// Orthant index o: bit k set <=> x[k+1] is taken with sign -1 in the
/// linearized sum of |x_k|. Variables (x[1..15], r); maximize r.
polytope::LinearProgram orthant_lp(std::uint32_t orthant);
inline constexpr std::uint32_t kOrthants = 1u << (kBloch - 1);

enum class LpMode { max_only, census };

struct LpSweepOptions {
  double optimal_tol = 1e-7;    // r >= r* - optimal_tol counts as optimal
  double dedup_tol = 1e-7;      // Euclidean distance in x
  double rank_cutoff = qmat::tol::rank_cutoff;
  double positive_tol = 1e-9;   // r > positive_tol counts as positive radius
  int workers = 0;              // 0: default worker count
  std::function<void(std::uint32_t done, std::uint32_t total)> progress;
};

struct CensusVertex {
  BlochCoeffs x;
  double r = 0.0;       // LP coordinate
  double radius = 0.0;  // ball radius of the state
  int rank = 0;
};

struct OptimumReport {
  LpMode mode = LpMode::max_only;
  double r_star = 0.0;
  BlochCoeffs maximizer;
  std::uint32_t maximizer_orthant = 0;
  std::uint32_t orthants = 0;
  std::uint32_t infeasible_orthants = 0;
  std::uint32_t positive_orthants = 0;
  std::uint32_t optimal_orthants = 0;
  long long pivots = 0;

  // census only
  LpSweepOptions options;
  std::vector<CensusVertex> optimal_vertices;  // deduplicated, sorted
  std::size_t optimal_face_vertex_count = 0;   // cross-check via optimal faces
  std::map<int, int> optimal_rank_histogram;
  int min_rank_optimal = 0;
  std::size_t positive_vertex_count = 0;       // deduplicated, r > positive_tol
  std::map<int, int> positive_rank_histogram;
  std::map<int, double> positive_rank_max_r;   // largest LP r per rank
  int min_rank_positive = 0;
  CensusVertex min_rank_positive_example;      // largest r among minimal rank
  std::size_t flagged_vertices = 0;
};

/// Sweeps all 2^15 orthant LPs. Census mode additionally enumerates every
/// vertex of every positive-optimum orthant polytope.
OptimumReport optimize_ququart_lp(LpMode mode, const LpSweepOptions& options = {});

/// Eigenvalues of rho above cutoff.
int state_rank(const BipartiteOperator& rho, double cutoff = qmat::tol::rank_cutoff);

}  // namespace bentcert::families
