#pragma once

// Randomized property checks shared by the unit tests and the acceptance run.

#include <cstdint>
#include <vector>

#include "bentcert/hyptest.hpp"

namespace testing {

struct DirectionBounds {
  int dimension = 0;           // d for the eigenvalue bound, dA for the realignment bound
  double max_inf_excess = 0.0;  // max over samples of ||X||_inf - sqrt((d-1)/d)
  double max_realign_excess = 0.0;
  double inf_witness_error = 0.0;
  double realign_witness_error = 0.0;
};

/// Random unit traceless directions on C^dA (x) C^dA for dA = 2, 3, 4.
std::vector<DirectionBounds> direction_bounds(int samples, std::uint64_t seed);

struct ClosedFormAgreement {
  double pt_error = 0.0;
  double ccnr_error = 0.0;
};

ClosedFormAgreement qutrit_closed_forms(int samples, std::uint64_t seed);

struct LinearFormAgreement {
  double spectrum_error = 0.0;  // sorted (1/4)Mx + 1/16 against the dense spectrum
  double pt_error = 0.0;        // spectrum of Gamma(rho(x)) against that of rho(Dx)
};

LinearFormAgreement bloch_linear_form(int samples, std::uint64_t seed);

struct MonteCarloPoint {
  int m = 0;
  double s = 0.0;
  double u = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double z = 0.0;  // |empirical - analytic| in binomial standard deviations
};

/// 20 (m, s, u) grid points; samples draws of sum_i (z_i + mu_i)^2 each.
std::vector<MonteCarloPoint> noncentral_chi2_monte_carlo(int samples, std::uint64_t seed);

struct SimulationPoint {
  double n = 0.0;
  double k = 0.0;
  double analytic = 0.0;
  double fraction = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double z = 0.0;  // |fraction - analytic| / sqrt(p (1 - p) / trials)

  bool bracketed() const { return analytic >= lo && analytic <= hi; }
};

/// Qutrit MUB plan with 5% noise at three (n, k) points. The plan's
/// covariance is evaluated at the given state.
std::vector<SimulationPoint> simulated_failure(int trials, std::uint64_t seed,
                                               bentcert::hyptest::CovarianceAt covariance = {});

}  // namespace testing
