#ifndef ERMR_ANALYSIS_HPP
#define ERMR_ANALYSIS_HPP

// Empirical Rademacher complexity estimates, MIL Rademacher bound formulas,
// the LCL risk rescaling factor and assembly of the resulting risk bounds.
//
// The MIL bound expressions carry unspecified O(.) constants; every hidden
// constant is set to 1 here, so the returned values are order-of-magnitude
// indicators rather than certified bounds.

#include <cstdint>
#include <span>
#include <vector>

#include "ermr/core.hpp"

namespace ermr {

/// losses[h][i]: loss of hypothesis h on example i. All rows have length n.
using LossMatrix = std::vector<std::vector<double>>;

struct RademacherEstimate {
  double value = 0.0;           // mean over trials of sup_h (1/n) sum_i sigma_i loss[h][i]
  double standard_error = 0.0;  // sample standard deviation of per-trial sups / sqrt(trials)
  std::vector<double> per_trial;
};

/// Seeded sigma draws shared by every estimator: trial t, example i.
std::vector<std::vector<int>> rademacher_signs(std::size_t n, std::size_t trials, std::uint64_t seed);

/// sup_h sum_i sigma_i loss[h][i] for one sign vector, summed in index order.
double signed_sup(const LossMatrix& losses, std::span<const int> sigma);

RademacherEstimate rademacher_mc_estimate(const LossMatrix& losses, std::size_t trials,
                                          std::uint64_t seed);

LossMatrix loss_matrix(std::span<const MILExample> sample, std::span<const LinearWeights> hypotheses,
                       BinaryLoss loss);
LossMatrix loss_matrix(std::span<const TRLExample> sample, std::span<const LinearWeights> hypotheses);
LossMatrix loss_matrix(std::span<const MCLExample> sample,
                       std::span<const MulticlassWeights> hypotheses);
LossMatrix loss_matrix(std::span<const LCLExample> sample,
                       std::span<const MulticlassWeights> hypotheses);

template <typename Example, typename Hypothesis>
RademacherEstimate rademacher_mc_estimate(std::span<const Example> sample,
                                          std::span<const Hypothesis> hypotheses,
                                          std::size_t trials, std::uint64_t seed) {
  return rademacher_mc_estimate(loss_matrix(sample, hypotheses), trials, seed);
}

struct BoundParams {
  double lipschitz = 1.0;
  double r_norm = 1.0;
  double lambda_cap = 1.0;
  std::size_t n = 1;
  std::size_t total_bag_instances = 1;
  std::size_t union_instances = 1;
  double eta = 0.0;   // no default: callers must supply it
  double delta = 0.05;

  void validate() const;
};

struct ComplexityBound {
  double expr1 = 0.0;  // L r Lambda log2(4 L^2 r^2 Lambda^2 n sum|B_i|) ln(L^2 n) / sqrt(n)
  double expr2 = 0.0;  // L r Lambda sqrt(eta ln|U B_i|) / sqrt(n)
  bool expr1_degenerate = false;
  bool expr2_degenerate = false;
  double value = 0.0;  // min(expr1, expr2)
};

ComplexityBound mil_complexity_bound(const BoundParams& p);

enum class DeviationMode { kLiteral, kLogForm };

/// kLiteral: 3 sqrt((1/delta) / 2n).  kLogForm: 3 sqrt(ln(1/delta) / 2n).
double deviation_term(std::size_t n, double delta, DeviationMode mode);

/// (k - 1) / (theta (k - 2) + 1): multiplies an LCL risk into a multi-class risk.
double lcl_risk_scale(double theta, int classes);

double assemble_bound(double empirical_risk, double complexity, double deviation, double scale);

struct BagStatistics {
  std::size_t n = 0;
  std::size_t total_instances = 0;
  std::size_t union_instances = 0;  // distinct instances, exact coordinate equality
  double max_norm = 0.0;
};

BagStatistics bag_statistics(std::span<const MILExample> sample);

}  // namespace ermr

#endif  // ERMR_ANALYSIS_HPP
