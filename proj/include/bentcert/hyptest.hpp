#pragma once

// Tomographic measurement models, the reduced multinomial covariance, the
// standardized distance statistic and its noncentral chi-squared bound.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bentcert/qmat.hpp"

namespace bentcert::hyptest {

using qmat::BipartiteOperator;

struct Setting {
  std::string label;
  std::vector<CMatrix> effects;  // positive semidefinite, summing to the identity
};

struct MeasurementModel {
  std::string name;
  int dA = 0;
  int dB = 0;
  std::vector<Setting> settings;

  int dim() const { return dA * dB; }
  std::size_t outcomes() const;
  /// Sum over settings of (outcomes - 1).
  int reduced_dimension() const;
};

/// Per setting: effects Hermitian, PSD and summing to 1 within 1e-12.
/// Throws InvalidInput naming the offending setting.
void validate(const MeasurementModel& model);

/// Rank of the Gram matrix of all effects in the real space of Hermitian
/// operators; equals dim^2 for a tomographically complete model.
int span_rank(const MeasurementModel& model);

/// Local qutrit MUBs M0..M3 (rows are the basis vectors).
std::array<CMatrix, 4> qutrit_mubs();

/// All 16 products of local MUBs, 9 outcomes each.
MeasurementModel mub_model_qutrit();

/// Each party measures a pair of Pauli observables (sigma_mu, sigma_nu) on
/// its two qubits, mu, nu in {1,2,3}: 81 settings, 16 outcomes each.
MeasurementModel pauli_pair_model_ququart();

using Table = std::vector<std::vector<double>>;  // [setting][outcome]

/// tr(E rho) for every effect.
Table probability_map(const MeasurementModel& model, const BipartiteOperator& rho);

/// g_a (x) g_b over local Gell-Mann bases without the identity term:
/// orthonormal and traceless, dA^2 dB^2 - 1 elements.
std::vector<CMatrix> traceless_product_basis(int dA, int dB);

enum class CovarianceAt { target, prepared };

struct PlanOptions {
  // Sigma from T(rho0) by default, so the statistic needs only plan data.
  CovarianceAt covariance = CovarianceAt::target;
  // Outcome dropped per setting; empty means the last one everywhere.
  std::vector<int> dropped;
};

struct TestPlan {
  std::string model_name;
  std::vector<std::string> labels;
  int m = 0;
  double c1 = 0.0;                 // r1 / sqrt(n)
  double c2 = 0.0;                 // r2 / sqrt(n)
  double r0 = 0.0;
  double noise = 0.0;
  double lambda_min_fisher = 0.0;  // lambda_min(S^T Sigma_1^{-1} S)
  double hs_offset = 0.0;          // ||rho0 - rho_exp||_2
  CovarianceAt covariance = CovarianceAt::target;
  std::vector<int> dropped;
  Table p_target;                  // T(rho0)
  Table p_prepared;                // T(rho_exp)
  Table p_covariance;              // probabilities defining Sigma
  // Unit eigenvector of S^T Sigma_1^{-1} S for lambda_min_fisher, in the
  // coordinates of traceless_product_basis: the direction in which a state
  // at distance r0 is hardest to tell apart from rho0.
  std::vector<double> worst_direction;
  std::optional<BipartiteOperator> target;
  std::optional<BipartiteOperator> prepared;

  /// The test gains power with n only if c1 > c2.
  bool useful() const { return c1 > c2; }
};

/// rho_exp = (1 - noise) rho0 + noise 1/d. Throws InvalidInput for an
/// incomplete model, r0 <= 0, or a zero probability in a covariance block.
TestPlan plan(const MeasurementModel& model, const BipartiteOperator& rho0, double r0, double noise,
              const PlanOptions& options = {});

/// sqrt(n v^T Sigma_1^{-1} v), v = T(rho0) - x over kept outcomes; x holds
/// frequencies per setting (all outcomes, the dropped one is ignored).
double test_statistic(const TestPlan& plan, const Table& frequencies, double n);

/// Same with raw counts; setting l contributes with its own total n_l.
double test_statistic(const TestPlan& plan, const std::vector<std::vector<std::int64_t>>& counts);

/// q_m(s, u): CDF at s of the noncentral chi-squared distribution with m
/// degrees of freedom and noncentrality u.
double noncentral_chi2_cdf(int m, double s, double u);

/// 1 - q_m(s, u), summed directly so small tails stay accurate.
double noncentral_chi2_sf(int m, double s, double u);

/// s with q_m(s, u) = p, by bisection.
double chi2_quantile(int m, double p, double u);

/// Two-sided normal tail erfc(k / sqrt 2).
double significance(double k_sigma);

struct FailureEstimate {
  double p_fail = 0.0;
  double t0_sq = 0.0;  // acceptance threshold on t^2
  double p0 = 0.0;
  bool warning = false;  // c1 <= c2
};

/// 1 - q_m(t0^2, c2^2 n) with q_m(t0^2, c1^2 n) = p0.
FailureEstimate p_fail(const TestPlan& plan, double k_sigma, double n);
FailureEstimate p_fail(int m, double c1, double c2, double k_sigma, double n);

/// Smallest n (real, found by bisection in log n on [1, 1e12]) with
/// p_fail <= target. Throws NumericalError if unreachable.
double required_samples(int m, double c1, double c2, double k_sigma, double target);

/// q_m(t^2, c1^2 n).
double p_value(const TestPlan& plan, const Table& frequencies, double n);

/// With counts, n is the smallest per-setting total, which keeps the bound
/// conservative.
double p_value(const TestPlan& plan, const std::vector<std::vector<std::int64_t>>& counts);

}  // namespace bentcert::hyptest
