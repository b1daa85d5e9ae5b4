#ifndef ERMR_ORACLE_HPP
#define ERMR_ORACLE_HPP

// Brute-force checks of the reduction machinery.
//
// Finite hypothesis grids stand in for the continuous classes. The identities
// checked here (loss equality, ERM equality, per-draw Rademacher suprema) hold
// hypothesis by hypothesis, so a matched pair of finite sets verifies the
// mechanism exactly; it does not claim anything about suprema over the full
// continuous class.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ermr/core.hpp"
#include "ermr/datagen.hpp"
#include "ermr/reductions.hpp"
#include "ermr/report.hpp"
#include "ermr/solvers.hpp"

namespace ermr {

struct HypothesisGrid {
  std::vector<std::vector<double>> points;
  std::string description;
  double lambda_cap = 1.0;

  std::size_t dim() const { return points.front().size(); }
  std::size_t size() const { return points.size(); }
  std::vector<LinearWeights> as_linear() const;
  std::vector<MulticlassWeights> as_multiclass(int classes) const;
};

/// Zero vector, then `extra` (each must respect the cap), then seeded random
/// points uniform in the radius-lambda_cap ball, `count` points in total.
HypothesisGrid random_grid(std::size_t dim, std::size_t count, double lambda_cap, std::uint64_t seed,
                           const std::vector<std::vector<double>>& extra = {});

/// Zero vector plus, for each of `directions` seeded unit directions, the
/// radii lambda_cap * j / radius_steps for j = 1..radius_steps.
HypothesisGrid radial_grid(std::size_t dim, std::size_t directions, std::size_t radius_steps,
                           double lambda_cap, std::uint64_t seed);

struct ErmResult {
  double total = 0.0;  // minimal sum of losses; integral for 0/1 losses
  double risk = 0.0;   // total / n (0 for an empty sample)
  std::size_t argmin = 0;
};

/// Exact minimum over grid points; ties go to the lowest grid index.
ErmResult brute_force_erm(std::span<const MILExample> sample, BinaryLoss loss, const HypothesisGrid& grid);
ErmResult brute_force_erm(std::span<const TRLExample> sample, const HypothesisGrid& grid);
/// Grid points live in the flattened d*k space of W.
ErmResult brute_force_erm(std::span<const MCLExample> sample, const HypothesisGrid& grid);
ErmResult brute_force_erm(std::span<const LCLExample> sample, const HypothesisGrid& grid);

VerificationReport verify_erm_equality(std::span<const TRLExample> sample, const HypothesisGrid& grid);
VerificationReport verify_erm_equality(std::span<const MCLExample> sample, const HypothesisGrid& grid);
VerificationReport verify_erm_equality(std::span<const LCLExample> sample, const HypothesisGrid& grid);

/// Diagnostic for a non-onto hypothesis map: the minimum over the full grid
/// must not exceed the minimum over the image of the sub-grid `subset`.
VerificationReport verify_erm_subgrid_inequality(std::span<const MCLExample> sample,
                                                 const HypothesisGrid& grid,
                                                 std::span<const std::size_t> subset);

VerificationReport verify_rademacher_equality(std::span<const TRLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed);
VerificationReport verify_rademacher_equality(std::span<const MCLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed);
VerificationReport verify_rademacher_equality(std::span<const LCLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed);

/// Monte-Carlo check of R_MC = (k-1)/(theta(k-2)+1) R_LC for a fixed W.
/// cfg supplies d, k, theta, r_norm and margin; `seed` drives the draws.
/// Tolerance: 4 standard errors of the per-draw difference.
VerificationReport verify_lcl_rescaling_montecarlo(const GenConfig& cfg, const MulticlassWeights& W,
                                            std::size_t n_mc, std::uint64_t seed);

struct OptimalityCheck {
  double tol = 1e-4;
  std::size_t convexity_pairs = 1000;
  double convexity_slack = 1e-9;
  std::uint64_t seed = 0;
};

/// One-class sample only. Checks objective <= grid minimum + tol, that the
/// reported objective matches the weights, and the convexity inequality on
/// random pairs of points.
VerificationReport verify_solver_optimality(std::span<const MILExample> sample, double c_reg,
                                            const SolverResult& result, const HypothesisGrid& grid,
                                            const OptimalityCheck& check = {});

/// Fraction of reduced instances with norm <= bound + 1e-12 must be 1.
VerificationReport verify_norm_transport(std::span<const MILExample> reduced, double bound);

/// Loss equality on randomly drawn (example, hypothesis) pairs with standard
/// normal features and weights, d in 1..max_d, k in 2..max_k, |A| in 1..max_set.
struct RandomPairsConfig {
  std::size_t draws = 10000;
  std::uint64_t seed = 0;
  std::size_t max_d = 5;
  int max_k = 6;
  std::size_t max_set = 8;
};

VerificationReport verify_loss_equality_random(ProblemKind kind, const RandomPairsConfig& cfg);

}  // namespace ermr

#endif  // ERMR_ORACLE_HPP
