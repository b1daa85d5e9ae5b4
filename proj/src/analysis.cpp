#include "ermr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ermr {

std::vector<std::vector<int>> rademacher_signs(std::size_t n, std::size_t trials,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> signs(trials, std::vector<int>(n));
  for (auto& draw : signs) {
    for (int& s : draw) s = (rng() >> 63) ? 1 : -1;
  }
  return signs;
}

double signed_sup(const LossMatrix& losses, std::span<const int> sigma) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : losses) {
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += sigma[i] * row[i];
    best = std::max(best, s);
  }
  return best;
}

RademacherEstimate rademacher_mc_estimate(const LossMatrix& losses, std::size_t trials,
                                          std::uint64_t seed) {
  if (losses.empty()) throw std::invalid_argument("rademacher_mc_estimate: empty hypothesis set");
  const std::size_t n = losses.front().size();
  if (n == 0) throw std::invalid_argument("rademacher_mc_estimate: empty sample");
  for (const auto& row : losses) {
    if (row.size() != n) throw DimensionError("rademacher_mc_estimate: ragged loss matrix");
  }
  if (trials == 0) throw std::invalid_argument("rademacher_mc_estimate: trials must be >= 1");

  RademacherEstimate est;
  est.per_trial.reserve(trials);
  for (const auto& sigma : rademacher_signs(n, trials, seed)) {
    est.per_trial.push_back(signed_sup(losses, sigma) / static_cast<double>(n));
  }
  double sum = 0.0;
  for (double v : est.per_trial) sum += v;
  est.value = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double v : est.per_trial) ss += (v - est.value) * (v - est.value);
    est.standard_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  return est;
}

namespace {

template <typename Example, typename Hypothesis, typename Loss>
LossMatrix build(std::span<const Example> sample, std::span<const Hypothesis> hypotheses, Loss loss) {
  if (sample.empty()) throw std::invalid_argument("loss_matrix: empty sample");
  if (hypotheses.empty()) throw std::invalid_argument("loss_matrix: empty hypothesis set");
  LossMatrix m;
  m.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    std::vector<double> row;
    row.reserve(sample.size());
    for (const auto& ex : sample) row.push_back(loss(h, ex));
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace

LossMatrix loss_matrix(std::span<const MILExample> sample, std::span<const LinearWeights> hypotheses,
                       BinaryLoss loss) {
  return build(sample, hypotheses, [loss](const LinearWeights& w, const MILExample& ex) {
    return binary_loss(loss, ex.label(), bag_score(w, ex.bag()));
  });
}

LossMatrix loss_matrix(std::span<const TRLExample> sample, std::span<const LinearWeights> hypotheses) {
  return build(sample, hypotheses,
               [](const LinearWeights& w, const TRLExample& ex) { return double(trl_loss(w, ex)); });
}

LossMatrix loss_matrix(std::span<const MCLExample> sample,
                       std::span<const MulticlassWeights> hypotheses) {
  return build(sample, hypotheses,
               [](const MulticlassWeights& W, const MCLExample& ex) { return double(mcl_loss(W, ex)); });
}

LossMatrix loss_matrix(std::span<const LCLExample> sample,
                       std::span<const MulticlassWeights> hypotheses) {
  return build(sample, hypotheses,
               [](const MulticlassWeights& W, const LCLExample& ex) { return double(lcl_loss(W, ex)); });
}

void BoundParams::validate() const {
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("BoundParams: lipschitz must be >= 0");
  if (!(r_norm > 0.0)) throw std::invalid_argument("BoundParams: r_norm must be positive");
  if (!(lambda_cap > 0.0) || std::isinf(lambda_cap)) {
    throw std::invalid_argument("BoundParams: lambda_cap must be positive and finite");
  }
  if (n < 1) throw std::invalid_argument("BoundParams: n must be >= 1");
  if (total_bag_instances < 1) throw std::invalid_argument("BoundParams: total_bag_instances must be >= 1");
  if (union_instances < 1 || union_instances > total_bag_instances) {
    throw std::invalid_argument("BoundParams: union_instances must lie in 1..total_bag_instances");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("BoundParams: eta must be supplied and positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("BoundParams: delta must lie in (0,1)");
}

ComplexityBound mil_complexity_bound(const BoundParams& p) {
  p.validate();
  ComplexityBound b;
  const double scale = p.lipschitz * p.r_norm * p.lambda_cap;
  const double sqrt_n = std::sqrt(static_cast<double>(p.n));
  const double l2 = p.lipschitz * p.lipschitz;

  const double log2_arg = 4.0 * l2 * p.r_norm * p.r_norm * p.lambda_cap * p.lambda_cap *
                          static_cast<double>(p.n) * static_cast<double>(p.total_bag_instances);
  const double ln_arg = l2 * static_cast<double>(p.n);
  if (log2_arg <= 1.0 || ln_arg <= 1.0) {
    b.expr1_degenerate = true;
  } else {
    b.expr1 = scale * std::log2(log2_arg) * std::log(ln_arg) / sqrt_n;
  }

  const double union_arg = static_cast<double>(p.union_instances);
  if (union_arg <= 1.0) {
    b.expr2_degenerate = true;
  } else {
    b.expr2 = scale * std::sqrt(p.eta * std::log(union_arg)) / sqrt_n;
  }
  b.value = std::min(b.expr1, b.expr2);
  return b;
}

double deviation_term(std::size_t n, double delta, DeviationMode mode) {
  if (n < 1) throw std::invalid_argument("deviation_term: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("deviation_term: delta must lie in (0,1)");
  const double numerator = mode == DeviationMode::kLiteral ? 1.0 / delta : std::log(1.0 / delta);
  return 3.0 * std::sqrt(numerator / (2.0 * static_cast<double>(n)));
}

double lcl_risk_scale(double theta, int classes) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("lcl_risk_scale: theta must lie in [0,1]");
  if (classes < 2) throw std::invalid_argument("lcl_risk_scale: k must be >= 2");
  return (classes - 1.0) / (theta * (classes - 2.0) + 1.0);
}

double assemble_bound(double empirical_risk, double complexity, double deviation, double scale) {
  return scale * (empirical_risk + 2.0 * complexity + deviation);
}

BagStatistics bag_statistics(std::span<const MILExample> sample) {
  BagStatistics s;
  s.n = sample.size();
  std::vector<Instance> all;
  for (const auto& ex : sample) {
    for (const auto& x : ex.bag()) {
      all.push_back(x);
      s.max_norm = std::max(s.max_norm, x.norm());
    }
  }
  s.total_instances = all.size();
  std::sort(all.begin(), all.end());
  s.union_instances = static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  return s;
}

}  // namespace ermr
