#include <algorithm>
#include <cmath>
#include <sstream>

#include "bentcert/error.hpp"
#include "bentcert/hyptest.hpp"
#include "bentcert/simd/kernels.hpp"

namespace bentcert::hyptest {

namespace {

constexpr double kMinProbability = 1e-14;

void require_positive(const Table& p, const std::vector<std::string>& labels) {
  for (std::size_t l = 0; l < p.size(); ++l)
    for (std::size_t k = 0; k < p[l].size(); ++k)
      if (!(p[l][k] > kMinProbability)) {
        std::ostringstream msg;
        msg << "covariance is singular: setting " << labels[l] << " outcome " << k << " has probability "
            << p[l][k];
        throw InvalidInput(msg.str());
      }
}

// v^T Sigma_1^{-1} v for one setting: Sigma_1^{-1} = diag(1/q) + 1 1^T / q_dropped
// over the kept outcomes.
double quadratic_form(const std::vector<double>& v, const std::vector<double>& q, int dropped) {
  double diag = 0.0, total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (static_cast<int>(k) == dropped) continue;
    diag += v[k] * v[k] / q[k];
    total += v[k];
  }
  return diag + total * total / q[static_cast<std::size_t>(dropped)];
}

void check_shape(const TestPlan& plan, std::size_t settings, const std::vector<std::size_t>& sizes) {
  if (settings != plan.p_target.size()) throw InvalidInput("data has a different number of settings than the plan");
  for (std::size_t l = 0; l < settings; ++l)
    if (sizes[l] != plan.p_target[l].size()) {
      std::ostringstream msg;
      msg << "setting " << plan.labels[l] << ": expected " << plan.p_target[l].size() << " outcomes, got "
          << sizes[l];
      throw InvalidInput(msg.str());
    }
}

}  // namespace

std::vector<CMatrix> traceless_product_basis(int dA, int dB) {
  const auto a = qmat::operator_basis(dA, qmat::BasisKind::gellmann).elements;
  const auto b = qmat::operator_basis(dB, qmat::BasisKind::gellmann).elements;
  std::vector<CMatrix> out;
  out.reserve(a.size() * b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != 0 || j != 0) out.push_back(kron(a[i], b[j]));
  return out;
}

TestPlan plan(const MeasurementModel& model, const BipartiteOperator& rho0, double r0, double noise,
              const PlanOptions& options) {
  validate(model);
  const int d = model.dim();
  if (span_rank(model) != d * d) throw InvalidInput("plan: measurement model is not tomographically complete");
  if (rho0.dA() != model.dA || rho0.dB() != model.dB)
    throw InvalidInput("plan: target dimensions do not match the model");
  qmat::require_state(rho0);
  if (!(r0 > 0.0)) throw InvalidInput("plan: r0 must be positive");
  if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidInput("plan: noise must lie in [0, 1]");

  TestPlan tp;
  tp.model_name = model.name;
  for (const auto& s : model.settings) tp.labels.push_back(s.label);
  tp.m = model.reduced_dimension();
  tp.r0 = r0;
  tp.noise = noise;
  tp.covariance = options.covariance;

  const std::size_t L = model.settings.size();
  if (options.dropped.empty()) {
    for (const auto& s : model.settings) tp.dropped.push_back(static_cast<int>(s.effects.size()) - 1);
  } else {
    if (options.dropped.size() != L) throw InvalidInput("plan: one dropped outcome per setting is required");
    for (std::size_t l = 0; l < L; ++l)
      if (options.dropped[l] < 0 || options.dropped[l] >= static_cast<int>(model.settings[l].effects.size()))
        throw InvalidInput("plan: dropped outcome index out of range for setting " + tp.labels[l]);
    tp.dropped = options.dropped;
  }

  const auto mixed = BipartiteOperator::maximally_mixed(model.dA, model.dB);
  const BipartiteOperator prepared = (1.0 - noise) * rho0 + noise * mixed;
  tp.p_target = probability_map(model, rho0);
  tp.p_prepared = probability_map(model, prepared);
  tp.p_covariance = options.covariance == CovarianceAt::target ? tp.p_target : tp.p_prepared;
  require_positive(tp.p_covariance, tp.labels);
  tp.hs_offset = hs_norm(rho0.entries() - prepared.entries());

  // S^T Sigma_1^{-1} S accumulated setting by setting as rank-one updates.
  const auto basis = traceless_product_basis(model.dA, model.dB);
  const std::size_t nb = basis.size();
  RMatrix fisher(nb, nb);
  std::vector<double> row(nb), total(nb);
  auto rank_one = [&](const std::vector<double>& v, double w) {
    for (std::size_t i = 0; i < nb; ++i)
      if (v[i] != 0.0) simd::axpy(w * v[i], v, fisher.row(i));
  };
  for (std::size_t l = 0; l < L; ++l) {
    const auto& effects = model.settings[l].effects;
    const auto& q = tp.p_covariance[l];
    std::fill(total.begin(), total.end(), 0.0);
    for (std::size_t k = 0; k < effects.size(); ++k) {
      if (static_cast<int>(k) == tp.dropped[l]) continue;
      for (std::size_t i = 0; i < nb; ++i) row[i] = hs_inner(basis[i], effects[k]).real();
      rank_one(row, 1.0 / q[k]);
      for (std::size_t i = 0; i < nb; ++i) total[i] += row[i];
    }
    rank_one(total, 1.0 / q[static_cast<std::size_t>(tp.dropped[l])]);
  }
  const auto eig = qmat::eig_symmetric(fisher);
  tp.lambda_min_fisher = eig.values.front();
  if (!(tp.lambda_min_fisher > 0.0)) throw NumericalError("plan: S^T Sigma^{-1} S is not positive definite");
  tp.worst_direction.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) tp.worst_direction[i] = eig.vectors(i, 0);
  tp.c1 = r0 * std::sqrt(tp.lambda_min_fisher);

  double c2sq = 0.0;
  std::vector<double> diff;
  for (std::size_t l = 0; l < L; ++l) {
    diff.resize(tp.p_target[l].size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = tp.p_target[l][k] - tp.p_prepared[l][k];
    c2sq += quadratic_form(diff, tp.p_covariance[l], tp.dropped[l]);
  }
  tp.c2 = std::sqrt(c2sq);
  tp.target = rho0;
  tp.prepared = prepared;
  return tp;
}

double test_statistic(const TestPlan& plan, const Table& frequencies, double n) {
  if (!(n > 0.0)) throw InvalidInput("test_statistic: n must be positive");
  std::vector<std::size_t> sizes;
  for (const auto& f : frequencies) sizes.push_back(f.size());
  check_shape(plan, frequencies.size(), sizes);
  double t2 = 0.0;
  std::vector<double> v;
  for (std::size_t l = 0; l < frequencies.size(); ++l) {
    v.resize(frequencies[l].size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = plan.p_target[l][k] - frequencies[l][k];
    t2 += quadratic_form(v, plan.p_covariance[l], plan.dropped[l]);
  }
  return std::sqrt(n * t2);
}

double test_statistic(const TestPlan& plan, const std::vector<std::vector<std::int64_t>>& counts) {
  std::vector<std::size_t> sizes;
  for (const auto& c : counts) sizes.push_back(c.size());
  check_shape(plan, counts.size(), sizes);
  double t2 = 0.0;
  std::vector<double> v;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    std::int64_t nl = 0;
    for (auto c : counts[l]) {
      if (c < 0) throw InvalidInput("test_statistic: negative count in setting " + plan.labels[l]);
      nl += c;
    }
    if (nl == 0) throw InvalidInput("test_statistic: setting " + plan.labels[l] + " has no events");
    v.resize(counts[l].size());
    for (std::size_t k = 0; k < v.size(); ++k)
      v[k] = plan.p_target[l][k] - static_cast<double>(counts[l][k]) / static_cast<double>(nl);
    t2 += static_cast<double>(nl) * quadratic_form(v, plan.p_covariance[l], plan.dropped[l]);
  }
  return std::sqrt(t2);
}

double p_value(const TestPlan& plan, const Table& frequencies, double n) {
  const double t = test_statistic(plan, frequencies, n);
  return noncentral_chi2_cdf(plan.m, t * t, plan.c1 * plan.c1 * n);
}

double p_value(const TestPlan& plan, const std::vector<std::vector<std::int64_t>>& counts) {
  const double t = test_statistic(plan, counts);
  std::int64_t n_min = -1;
  for (const auto& c : counts) {
    std::int64_t nl = 0;
    for (auto x : c) nl += x;
    if (n_min < 0 || nl < n_min) n_min = nl;
  }
  return noncentral_chi2_cdf(plan.m, t * t, plan.c1 * plan.c1 * static_cast<double>(n_min));
}

}  // namespace bentcert::hyptest
