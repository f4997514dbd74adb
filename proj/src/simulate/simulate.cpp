#include "bentcert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bentcert/error.hpp"
#include "bentcert/parallel.hpp"

namespace bentcert::simulate {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void check_probabilities(const hyptest::Table& p) {
  for (std::size_t l = 0; l < p.size(); ++l) {
    double total = 0.0;
    for (double v : p[l]) {
      if (!(v >= 0.0)) throw InvalidInput("sample_counts: negative probability in setting " + std::to_string(l));
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InvalidInput("sample_counts: probabilities of setting " + std::to_string(l) + " do not sum to 1");
  }
}

Counts draw(const SimConfig& config, const hyptest::Table& probabilities, std::uint64_t trial) {
  Counts counts(probabilities.size());
  for (std::size_t l = 0; l < probabilities.size(); ++l) {
    Stream rng(config.seed, trial, l);
    const auto& p = probabilities[l];
    auto& c = counts[l];
    c.assign(p.size(), 0);
    if (config.sampling == Sampling::poisson) {
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] > 0.0)
          c[k] = std::poisson_distribution<std::int64_t>(static_cast<double>(config.n) * p[k])(rng);
      continue;
    }
    std::int64_t left = config.n;
    double mass = 1.0;
    for (std::size_t k = 0; k + 1 < p.size() && left > 0; ++k) {
      const double q = mass > 0.0 ? std::clamp(p[k] / mass, 0.0, 1.0) : 1.0;
      c[k] = std::binomial_distribution<std::int64_t>(left, q)(rng);
      left -= c[k];
      mass -= p[k];
    }
    c.back() += left;
  }
  return counts;
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.trials < 1) throw InvalidInput("simulate: trials must be at least 1");
  if (config.n < 1) throw InvalidInput("simulate: n must be at least 1");
}

Stream::Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t setting)
    : state_(mix(mix(mix(seed) ^ (trial + kGolden)) ^ (setting + 2 * kGolden))) {}

Stream::result_type Stream::operator()() {
  state_ += kGolden;
  return mix(state_);
}

Counts sample_counts(const SimConfig& config, const hyptest::Table& probabilities, std::uint64_t trial) {
  validate(config);
  check_probabilities(probabilities);
  return draw(config, probabilities, trial);
}

Counts sample_counts(const SimConfig& config, const hyptest::MeasurementModel& model,
                     const qmat::BipartiteOperator& rho, std::uint64_t trial) {
  qmat::require_state(rho);
  return sample_counts(config, hyptest::probability_map(model, rho), trial);
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials < 1 || successes < 0 || successes > trials) throw InvalidInput("wilson_interval: bad counts");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  // The score interval reaches 0 (or 1) exactly when no (or every) trial succeeds.
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

EmpiricalFailure empirical_pfail(const SimConfig& config, double k_sigma) {
  return empirical_pfail(config, k_sigma, config.plan.p_prepared);
}

EmpiricalFailure empirical_pfail(const SimConfig& config, double k_sigma, const hyptest::Table& probabilities) {
  validate(config);
  check_probabilities(probabilities);
  const auto analytic = hyptest::p_fail(config.plan, k_sigma, static_cast<double>(config.n));

  std::vector<char> failed(static_cast<std::size_t>(config.trials), 0);
  parallel_for(
      failed.size(),
      [&](std::size_t t) {
        const auto counts = draw(config, probabilities, t);
        const double stat = hyptest::test_statistic(config.plan, counts);
        failed[t] = stat * stat > analytic.t0_sq;
      },
      config.workers);

  EmpiricalFailure out;
  out.trials = config.trials;
  out.failures = std::count(failed.begin(), failed.end(), 1);
  out.fraction = static_cast<double>(out.failures) / static_cast<double>(out.trials);
  out.ci95 = wilson_interval(out.failures, out.trials);
  out.analytic = analytic.p_fail;
  out.t0_sq = analytic.t0_sq;
  out.p0 = analytic.p0;
  return out;
}

}  // namespace bentcert::simulate
