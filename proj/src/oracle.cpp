#include "ermr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ermr/analysis.hpp"

namespace ermr {

namespace {

void require_grid(const HypothesisGrid& grid, const char* what) {
  if (grid.points.empty()) throw std::invalid_argument(std::string(what) + ": empty hypothesis grid");
}

nlohmann::ordered_json vec_json(std::span<const double> v) {
  return nlohmann::ordered_json(std::vector<double>(v.begin(), v.end()));
}

// Lowest-index minimum of loss_sum(point) over the grid.
template <typename LossSum>
ErmResult grid_minimum(const HypothesisGrid& grid, std::size_t n, LossSum loss_sum) {
  ErmResult best;
  best.total = std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < grid.points.size(); ++h) {
    const double total = loss_sum(h);
    if (total < best.total) {
      best.total = total;
      best.argmin = h;
    }
  }
  best.risk = n == 0 ? 0.0 : best.total / static_cast<double>(n);
  return best;
}

template <typename Example>
int sample_classes(std::span<const Example> sample) {
  if (sample.empty()) throw std::invalid_argument("oracle: empty sample");
  return sample.front().classes();
}

// Sum of reduced 0/1 losses l_b(y', g_w(B')) for grid point h.
double reduced_total(const ReducedSample& reduced, std::span<const double> w) {
  double total = 0.0;
  for (const auto& ex : reduced.examples) total += zero_one_binary(ex.label(), bag_score(w, ex.bag()));
  return total;
}

template <typename Example, typename OriginalTotal>
VerificationReport erm_report(const char* name, std::span<const Example> sample, const HypothesisGrid& grid,
                                const ReducedSample& reduced, OriginalTotal original_total) {
  require_grid(grid, name);
  const ErmResult original = grid_minimum(grid, sample.size(), original_total);
  const ErmResult image = grid_minimum(grid, reduced.examples.size(),
                                       [&](std::size_t h) { return reduced_total(reduced, grid.points[h]); });
  // beta(argmin of the reduced problem) must attain the original minimum.
  const double restored = original_total(image.argmin);

  const auto lhs = static_cast<long>(original.total);
  const auto rhs = static_cast<long>(image.total);
  VerificationReport r = make_equality_report(name, static_cast<double>(lhs), static_cast<double>(rhs), 0.0);
  const bool restored_ok = static_cast<long>(restored) == lhs;
  r.passed = lhs == rhs && restored_ok;
  r.note = "finite-grid proxy: " + grid.description;
  if (!r.passed) {
    nlohmann::ordered_json w;
    w["original_min"] = lhs;
    w["reduced_min"] = rhs;
    w["original_argmin"] = original.argmin;
    w["reduced_argmin"] = image.argmin;
    w["restored_loss_sum"] = restored;
    w["restored_point"] = vec_json(grid.points[image.argmin]);
    r.witness = std::move(w);
  }
  return r;
}

template <typename Example>
VerificationReport rademacher_report(const char* name, std::span<const Example> sample,
                                     const LossMatrix& original, const ReducedSample& reduced,
                                     const HypothesisGrid& grid, std::size_t draws, std::uint64_t seed) {
  require_grid(grid, name);
  const std::size_t n = sample.size();
  // Reduced losses placed at original indices; dropped examples carry loss 0
  // in both spaces.
  LossMatrix image(grid.size(), std::vector<double>(n, 0.0));
  for (std::size_t h = 0; h < grid.size(); ++h) {
    for (std::size_t j = 0; j < reduced.examples.size(); ++j) {
      const auto& ex = reduced.examples[j];
      image[h][reduced.source_index[j]] = zero_one_binary(ex.label(), bag_score(grid.points[h], ex.bag()));
    }
  }
  std::size_t matches = 0;
  std::optional<nlohmann::ordered_json> witness;
  const auto signs = rademacher_signs(n, draws, seed);
  for (std::size_t t = 0; t < signs.size(); ++t) {
    const double a = signed_sup(original, signs[t]);
    const double b = signed_sup(image, signs[t]);
    if (a == b) {
      ++matches;
    } else if (!witness) {
      nlohmann::ordered_json w;
      w["draw"] = t;
      w["sigma"] = signs[t];
      w["original_sup"] = a;
      w["reduced_sup"] = b;
      witness = std::move(w);
    }
  }
  const auto est_original = rademacher_mc_estimate(original, draws, seed);
  const auto est_image = rademacher_mc_estimate(image, draws, seed);

  VerificationReport r = make_equality_report(name, est_original.value, est_image.value, 0.0);
  r.passed = r.passed && matches == draws;
  r.witness = std::move(witness);
  std::ostringstream note;
  note << matches << "/" << draws << " draws with identical suprema; finite-grid proxy: " << grid.description;
  r.note = note.str();
  return r;
}

}  // namespace

std::vector<LinearWeights> HypothesisGrid::as_linear() const {
  std::vector<LinearWeights> out;
  out.reserve(points.size());
  for (const auto& p : points) out.emplace_back(p, lambda_cap);
  return out;
}

std::vector<MulticlassWeights> HypothesisGrid::as_multiclass(int classes) const {
  std::vector<MulticlassWeights> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() % static_cast<std::size_t>(classes) != 0) {
      throw DimensionError("HypothesisGrid: point dimension not divisible by k");
    }
    out.emplace_back(classes, p.size() / static_cast<std::size_t>(classes), p, lambda_cap);
  }
  return out;
}

HypothesisGrid random_grid(std::size_t dim, std::size_t count, double lambda_cap, std::uint64_t seed,
                           const std::vector<std::vector<double>>& extra) {
  if (dim == 0 || count == 0) throw std::invalid_argument("random_grid: dim and count must be >= 1");
  if (!(lambda_cap > 0.0) || std::isinf(lambda_cap)) {
    throw std::invalid_argument("random_grid: lambda_cap must be positive and finite");
  }
  HypothesisGrid grid;
  grid.lambda_cap = lambda_cap;
  grid.points.emplace_back(dim, 0.0);
  for (const auto& p : extra) {
    if (p.size() != dim) throw DimensionError("random_grid: extra point has wrong dimension");
    if (norm(p) > lambda_cap) throw std::invalid_argument("random_grid: extra point exceeds lambda_cap");
    if (grid.points.size() < count) grid.points.push_back(p);
  }
  SampleStream stream(seed);
  while (grid.points.size() < count) {
    const Instance x = stream.uniform_in_ball(dim, lambda_cap);
    grid.points.emplace_back(x.coords().begin(), x.coords().end());
  }
  std::ostringstream desc;
  desc << count << " points (zero, " << extra.size() << " supplied, seeded uniform-in-ball radius "
       << lambda_cap << ", seed " << seed << ")";
  grid.description = desc.str();
  return grid;
}

HypothesisGrid radial_grid(std::size_t dim, std::size_t directions, std::size_t radius_steps,
                           double lambda_cap, std::uint64_t seed) {
  if (dim == 0 || directions == 0 || radius_steps == 0) {
    throw std::invalid_argument("radial_grid: dim, directions and radius_steps must be >= 1");
  }
  if (!(lambda_cap > 0.0) || std::isinf(lambda_cap)) {
    throw std::invalid_argument("radial_grid: lambda_cap must be positive and finite");
  }
  HypothesisGrid grid;
  grid.lambda_cap = lambda_cap;
  grid.points.emplace_back(dim, 0.0);
  SampleStream stream(seed);
  for (std::size_t i = 0; i < directions; ++i) {
    const Instance u = stream.uniform_in_ball(dim, 1.0);
    std::vector<double> dir(u.coords().begin(), u.coords().end());
    const double n = norm(dir);
    for (double& v : dir) v /= n;
    for (std::size_t j = 1; j <= radius_steps; ++j) {
      const double r = lambda_cap * static_cast<double>(j) / static_cast<double>(radius_steps);
      std::vector<double> p(dir);
      for (double& v : p) v *= r;
      const double pn = norm(p);
      if (pn > lambda_cap) {
        for (double& v : p) v *= lambda_cap / pn;
      }
      grid.points.push_back(std::move(p));
    }
  }
  std::ostringstream desc;
  desc << "radial grid: " << directions << " directions x " << radius_steps << " radii up to " << lambda_cap
       << " plus zero, seed " << seed;
  grid.description = desc.str();
  return grid;
}

ErmResult brute_force_erm(std::span<const MILExample> sample, BinaryLoss loss, const HypothesisGrid& grid) {
  require_grid(grid, "brute_force_erm");
  return grid_minimum(grid, sample.size(), [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += binary_loss(loss, ex.label(), bag_score(grid.points[h], ex.bag()));
    return total;
  });
}

ErmResult brute_force_erm(std::span<const TRLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "brute_force_erm");
  const auto hyps = grid.as_linear();
  return grid_minimum(grid, sample.size(), [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += trl_loss(hyps[h], ex);
    return total;
  });
}

ErmResult brute_force_erm(std::span<const MCLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "brute_force_erm");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  return grid_minimum(grid, sample.size(), [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += mcl_loss(hyps[h], ex);
    return total;
  });
}

ErmResult brute_force_erm(std::span<const LCLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "brute_force_erm");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  return grid_minimum(grid, sample.size(), [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += lcl_loss(hyps[h], ex);
    return total;
  });
}

VerificationReport verify_erm_equality(std::span<const TRLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "verify_erm_equality");
  const auto hyps = grid.as_linear();
  const ReducedSample reduced = reduce_sample(sample);
  return erm_report("erm_equality_trl", sample, grid, reduced, [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += trl_loss(hyps[h], ex);
    return total;
  });
}

VerificationReport verify_erm_equality(std::span<const MCLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "verify_erm_equality");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  const ReducedSample reduced = reduce_sample(sample);
  return erm_report("erm_equality_mcl", sample, grid, reduced, [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += mcl_loss(hyps[h], ex);
    return total;
  });
}

VerificationReport verify_erm_equality(std::span<const LCLExample> sample, const HypothesisGrid& grid) {
  require_grid(grid, "verify_erm_equality");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  const ReducedSample reduced = reduce_sample(sample);
  return erm_report("erm_equality_lcl", sample, grid, reduced, [&](std::size_t h) {
    double total = 0.0;
    for (const auto& ex : sample) total += lcl_loss(hyps[h], ex);
    return total;
  });
}

VerificationReport verify_erm_subgrid_inequality(std::span<const MCLExample> sample,
                                                 const HypothesisGrid& grid,
                                                 std::span<const std::size_t> subset) {
  require_grid(grid, "verify_erm_subgrid_inequality");
  if (subset.empty()) throw std::invalid_argument("verify_erm_subgrid_inequality: empty subset");
  HypothesisGrid sub;
  sub.lambda_cap = grid.lambda_cap;
  sub.description = "sub-grid of " + grid.description;
  for (std::size_t i : subset) sub.points.push_back(grid.points.at(i));
  const ErmResult full = brute_force_erm(sample, grid);
  const ReducedSample reduced = reduce_sample(sample);
  const ErmResult image = grid_minimum(sub, reduced.examples.size(),
                                       [&](std::size_t h) { return reduced_total(reduced, sub.points[h]); });
  VerificationReport r;
  r.name = "erm_inequality_subgrid (one-sided: lhs <= rhs)";
  r.lhs = full.total;
  r.rhs = image.total;
  r.passed = full.total <= image.total;
  r.note = "diagnostic only";
  return r;
}

VerificationReport verify_rademacher_equality(std::span<const TRLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed) {
  require_grid(grid, "verify_rademacher_equality");
  const auto hyps = grid.as_linear();
  return rademacher_report("rademacher_equality_trl", sample, loss_matrix(sample, std::span(hyps)),
                           reduce_sample(sample), grid, sigma_draws, seed);
}

VerificationReport verify_rademacher_equality(std::span<const MCLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed) {
  require_grid(grid, "verify_rademacher_equality");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  return rademacher_report("rademacher_equality_mcl", sample, loss_matrix(sample, std::span(hyps)),
                           reduce_sample(sample), grid, sigma_draws, seed);
}

VerificationReport verify_rademacher_equality(std::span<const LCLExample> sample, const HypothesisGrid& grid,
                                              std::size_t sigma_draws, std::uint64_t seed) {
  require_grid(grid, "verify_rademacher_equality");
  const auto hyps = grid.as_multiclass(sample_classes(sample));
  return rademacher_report("rademacher_equality_lcl", sample, loss_matrix(sample, std::span(hyps)),
                           reduce_sample(sample), grid, sigma_draws, seed);
}

VerificationReport verify_lcl_rescaling_montecarlo(const GenConfig& cfg, const MulticlassWeights& W,
                                            std::size_t n_mc, std::uint64_t seed) {
  cfg.validate();
  if (n_mc < 10000) throw std::invalid_argument("verify_lcl_rescaling_montecarlo: n_mc must be >= 10^4");
  if (W.classes() != cfg.k || W.dim() != cfg.d) throw DimensionError("verify_lcl_rescaling_montecarlo: W shape mismatch");

  SampleStream stream(seed);
  const MulticlassWeights planted = draw_planted_multiclass(stream, cfg.k, cfg.d);
  const double scale = lcl_risk_scale(cfg.theta, cfg.k);

  long mc_errors = 0;
  long lc_errors = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const MCLExample truth = draw_multiclass(stream, cfg, planted);
    const LCLExample observed = draw_complementary(stream, truth, cfg.theta);
    const int mc = mcl_loss(W, truth);
    const int lc = lcl_loss(W, observed);
    mc_errors += mc;
    lc_errors += lc;
    const double diff = mc - scale * lc;
    sum += diff;
    sum_sq += diff * diff;
  }
  const double n = static_cast<double>(n_mc);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));

  VerificationReport r;
  r.name = "lcl_risk_rescaling";
  r.lhs = static_cast<double>(mc_errors) / n;
  r.rhs = scale * static_cast<double>(lc_errors) / n;
  r.tolerance = 4.0 * std::sqrt(var / n);
  r.passed = std::fabs(r.lhs - r.rhs) <= r.tolerance;
  std::ostringstream note;
  note << "theta=" << cfg.theta << " k=" << cfg.k << " scale=" << scale << " n_mc=" << n_mc;
  r.note = note.str();
  if (!r.passed) {
    nlohmann::ordered_json w;
    w["seed"] = seed;
    w["theta"] = cfg.theta;
    w["weights"] = vec_json(W.flat());
    w["mc_errors"] = mc_errors;
    w["lc_errors"] = lc_errors;
    r.witness = std::move(w);
  }
  return r;
}

VerificationReport verify_solver_optimality(std::span<const MILExample> sample, double c_reg,
                                            const SolverResult& result, const HypothesisGrid& grid,
                                            const OptimalityCheck& check) {
  require_grid(grid, "verify_solver_optimality");
  if (sample.empty()) throw std::invalid_argument("verify_solver_optimality: empty sample");
  for (const auto& ex : sample) {
    if (ex.label() != -1) throw std::invalid_argument("verify_solver_optimality: one-class sample required");
  }
  double grid_min = std::numeric_limits<double>::infinity();
  std::size_t grid_arg = 0;
  for (std::size_t h = 0; h < grid.size(); ++h) {
    const double v = objective_misvm(sample, grid.points[h], c_reg);
    if (v < grid_min) {
      grid_min = v;
      grid_arg = h;
    }
  }
  const double recomputed = objective_misvm(sample, result.weights, c_reg);
  const bool consistent = std::fabs(recomputed - result.objective) <= 1e-9 * std::max(1.0, std::fabs(recomputed));
  const bool below_grid = result.objective <= grid_min + check.tol;

  // Convexity inequality on random pairs drawn from the grid and the solver output.
  std::mt19937_64 rng(check.seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto point = [&](std::size_t i) -> std::span<const double> {
    return i == grid.size() ? result.weights.values() : std::span<const double>(grid.points[i]);
  };
  std::optional<nlohmann::ordered_json> convexity_witness;
  std::vector<double> mid(grid.dim());
  for (std::size_t t = 0; t < check.convexity_pairs && !convexity_witness; ++t) {
    const auto a = point(pick(rng));
    const auto b = point(pick(rng));
    const double s = unit(rng);
    for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = s * a[j] + (1.0 - s) * b[j];
    const double lhs = objective_misvm(sample, mid, c_reg);
    const double rhs = s * objective_misvm(sample, a, c_reg) + (1.0 - s) * objective_misvm(sample, b, c_reg);
    if (lhs > rhs + check.convexity_slack) {
      nlohmann::ordered_json w;
      w["a"] = vec_json(a);
      w["b"] = vec_json(b);
      w["t"] = s;
      w["lhs"] = lhs;
      w["rhs"] = rhs;
      convexity_witness = std::move(w);
    }
  }

  VerificationReport r;
  r.name = "solver_optimality (one-sided: lhs <= rhs + tolerance)";
  r.lhs = result.objective;
  r.rhs = grid_min;
  r.tolerance = check.tol;
  r.passed = consistent && below_grid && !convexity_witness;
  if (!r.passed) {
    nlohmann::ordered_json w;
    w["weights"] = vec_json(result.weights.values());
    w["reported_objective"] = result.objective;
    w["recomputed_objective"] = recomputed;
    w["grid_min"] = grid_min;
    w["grid_argmin"] = vec_json(grid.points[grid_arg]);
    if (convexity_witness) w["convexity_violation"] = *convexity_witness;
    r.witness = std::move(w);
  }
  return r;
}

VerificationReport verify_norm_transport(std::span<const MILExample> reduced, double bound) {
  std::size_t total = 0;
  std::size_t within = 0;
  double worst = 0.0;
  for (const auto& ex : reduced) {
    for (const auto& x : ex.bag()) {
      ++total;
      const double n = x.norm();
      worst = std::max(worst, n);
      if (n <= bound + 1e-12) ++within;
    }
  }
  VerificationReport r;
  r.name = "norm_transport";
  r.lhs = total == 0 ? 1.0 : static_cast<double>(within) / static_cast<double>(total);
  r.rhs = 1.0;
  r.tolerance = 0.0;
  r.passed = within == total;
  std::ostringstream note;
  note << within << "/" << total << " instances within " << bound << "; max norm " << worst;
  r.note = note.str();
  return r;
}

VerificationReport verify_loss_equality_random(ProblemKind kind, const RandomPairsConfig& cfg) {
  if (kind == ProblemKind::kMIL) throw std::invalid_argument("verify_loss_equality_random: MIL has no reduction");
  SampleStream stream(cfg.seed);
  std::size_t violations = 0;
  std::optional<nlohmann::ordered_json> witness;
  auto instance = [&](std::size_t d) { return Instance(stream.gaussian(d)); };
  for (std::size_t t = 0; t < cfg.draws; ++t) {
    const auto d = static_cast<std::size_t>(stream.uniform_int(1, static_cast<int>(cfg.max_d)));
    VerificationReport one;
    if (kind == ProblemKind::kTRL) {
      const auto size = static_cast<std::size_t>(stream.uniform_int(1, static_cast<int>(cfg.max_set)));
      std::vector<Instance> items;
      for (std::size_t i = 0; i < size; ++i) items.push_back(instance(d));
      const auto target = static_cast<std::size_t>(stream.uniform_int(0, static_cast<int>(size) - 1));
      one = check_loss_equality(TRLExample(std::move(items), target), LinearWeights(stream.gaussian(d)));
    } else {
      const int k = stream.uniform_int(2, cfg.max_k);
      Instance x = instance(d);
      const int y = stream.uniform_int(1, k);
      MulticlassWeights W(k, d, stream.gaussian(static_cast<std::size_t>(k) * d));
      if (kind == ProblemKind::kMCL) {
        one = check_loss_equality(MCLExample(std::move(x), y, k), W);
      } else {
        const bool is_true = stream.uniform01() < 0.5;
        one = check_loss_equality(LCLExample(std::move(x), y, is_true, k), W);
      }
    }
    if (!one.passed) {
      ++violations;
      if (!witness) witness = one.witness;
    }
  }
  VerificationReport r;
  r.name = "loss_equality_random_" + to_string(kind);
  r.lhs = static_cast<double>(violations);
  r.rhs = 0.0;
  r.tolerance = 0.0;
  r.passed = violations == 0;
  r.witness = std::move(witness);
  std::ostringstream note;
  note << cfg.draws << " random pairs, seed " << cfg.seed;
  r.note = note.str();
  return r;
}

}  // namespace ermr
