#ifndef ERMR_SOLVERS_HPP
#define ERMR_SOLVERS_HPP

// ERM solvers for the hinge-loss MI-SVM
//
//   min_w  1/2 ||w||^2 + C sum_i max(0, 1 - y_i max_{x in B_i} <w, x>)
//
// train_oneclass_misvm handles the convex all-negative case exactly through
// its dual
//
//   max_a  sum a_ix - 1/2 || sum a_ix x ||^2,  a >= 0,  sum_{x in B_i} a_ix <= C,
//
// with w = -sum a_ix x. Each bag's block is a capped simplex, so the dual is
// optimised by pairwise (SMO-style) moves inside one bag at a time, and the
// solver stops once the duality gap certifies the objective.
//
// train_binary_misvm_dc runs CCCP on mixed labels: every positive bag is
// linearised at its current witness, which turns the subproblem into a
// one-class problem with the singleton bag {-witness}.

#include <cstdint>
#include <span>
#include <vector>

#include "ermr/core.hpp"

namespace ermr {

struct SolverConfig {
  double c_reg = 1.0;
  /// Relative duality gap (gap <= tol * max(1, objective)) for convex solves.
  double tol = 1e-6;
  /// Maximum dual sweeps per convex solve.
  int max_iters = 50000;
  /// CCCP stops once an outer step decreases the objective by less than this.
  double dc_epsilon = 1e-6;
  int max_outer_iters = 100;
  /// Extra CCCP runs from seeded random starting points; best objective wins.
  int restarts = 0;
  std::uint64_t seed = 0;
  double lambda_cap = kUncapped;

  void validate() const;
};

enum class SolverKind { kOneClass, kDifferenceOfConvex };

const char* to_string(SolverKind kind);

struct SolverResult {
  LinearWeights weights;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
  bool converged = false;
  double duality_gap = 0.0;  // last certified gap of the (final) convex solve
  SolverKind solver = SolverKind::kOneClass;
};

double objective_misvm(std::span<const MILExample> sample, std::span<const double> w,
                       double c_reg);
double objective_misvm(std::span<const MILExample> sample, const LinearWeights& w,
                       double c_reg);

SolverResult train_oneclass_misvm(std::span<const MILExample> sample, const SolverConfig& config);
SolverResult train_binary_misvm_dc(std::span<const MILExample> sample, const SolverConfig& config);

/// One-class solver when every label is -1, CCCP otherwise.
SolverResult train_misvm(std::span<const MILExample> sample, const SolverConfig& config);

struct MulticlassResult {
  MulticlassWeights weights;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double duality_gap = 0.0;
};

/// 1/2 ||W||^2 + C sum_i max(0, 1 + max_{y' != y_i} <w_{y'} - w_{y_i}, x_i>).
double objective_multiclass_svm(std::span<const MCLExample> sample, const MulticlassWeights& W,
                                double c_reg);

/// Crammer-Singer dual coordinate descent directly over W. Uncapped only;
/// a finite config.lambda_cap is rejected.
MulticlassResult train_multiclass_svm_direct(std::span<const MCLExample> sample,
                                             const SolverConfig& config);

}  // namespace ermr

#endif  // ERMR_SOLVERS_HPP
