#pragma once

// Synthetic counts from a measurement model and Monte Carlo estimates of the
// test's failure rate.

#include <cstdint>
#include <limits>
#include <vector>

#include "bentcert/hyptest.hpp"

namespace bentcert::simulate {

enum class Sampling { multinomial, poisson };

struct SimConfig {
  hyptest::TestPlan plan;
  std::int64_t n = 0;  // events per setting (expected events in Poisson mode)
  int trials = 2000;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::multinomial;
  int workers = 0;
};

/// Throws InvalidInput unless trials >= 1 and n >= 1.
void validate(const SimConfig& config);

/// SplitMix64 stream keyed by (seed, trial, setting). Streams for different
/// keys are independent of the order in which they are consumed.
class Stream {
 public:
  using result_type = std::uint64_t;
  Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t setting);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

using Counts = std::vector<std::vector<std::int64_t>>;  // [setting][outcome]

/// Counts for one trial from outcome probabilities (nonnegative, summing to 1
/// per setting). Multinomial: n per setting, via conditional binomials.
/// Poisson: independent draws with means n p.
Counts sample_counts(const SimConfig& config, const hyptest::Table& probabilities, std::uint64_t trial = 0);

/// Same with probabilities tr(E rho).
Counts sample_counts(const SimConfig& config, const hyptest::MeasurementModel& model,
                     const qmat::BipartiteOperator& rho, std::uint64_t trial = 0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% Wilson score interval for successes out of trials.
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

struct EmpiricalFailure {
  double fraction = 0.0;  // trials with t > t0
  Interval ci95;
  double analytic = 0.0;  // p_fail from the plan
  std::int64_t failures = 0;
  std::int64_t trials = 0;
  double t0_sq = 0.0;
  double p0 = 0.0;
};

/// Samples from the plan's prepared state.
EmpiricalFailure empirical_pfail(const SimConfig& config, double k_sigma);

/// Samples from the given outcome probabilities instead; `analytic` still
/// refers to the prepared state.
EmpiricalFailure empirical_pfail(const SimConfig& config, double k_sigma, const hyptest::Table& probabilities);

}  // namespace bentcert::simulate
