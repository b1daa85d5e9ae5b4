// Named oracle checks run by `ermr verify`. Sizes are chosen so that a full
// suite over ten seeds finishes in well under a minute.

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ermr/cli.hpp"
#include "ermr/oracle.hpp"

namespace ermr::cli {

namespace {

using Check = std::vector<VerificationReport> (*)(std::uint64_t);

VerificationReport tagged(VerificationReport r, const std::string& suffix) {
  r.name += "/" + suffix;
  return r;
}

std::vector<VerificationReport> loss_equality(std::uint64_t seed) {
  std::vector<VerificationReport> out;
  for (ProblemKind kind : {ProblemKind::kTRL, ProblemKind::kMCL, ProblemKind::kLCL}) {
    RandomPairsConfig cfg;
    cfg.seed = seed;
    out.push_back(tagged(verify_loss_equality_random(kind, cfg), to_string(kind)));
  }
  return out;
}

GenConfig small_config(std::uint64_t seed) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.n = 1 + seed % 8;
  cfg.d = 2;
  cfg.k = 3;
  cfg.set_size = 3;
  cfg.theta = 0.5;
  return cfg;
}

std::vector<VerificationReport> erm_equality(std::uint64_t seed) {
  const GenConfig cfg = small_config(seed);
  const auto trl = gen_trl(cfg);
  const auto mcl = gen_mcl(cfg);
  const auto lcl = gen_lcl(cfg);
  const std::size_t dk = cfg.d * static_cast<std::size_t>(cfg.k);
  return {
      tagged(verify_erm_equality(trl.examples, random_grid(cfg.d, 10000, 2.0, seed)), "trl"),
      tagged(verify_erm_equality(mcl.examples, random_grid(dk, 10000, 2.0, seed)), "mcl"),
      tagged(verify_erm_equality(lcl.examples, random_grid(dk, 10000, 2.0, seed)), "lcl"),
  };
}

std::vector<VerificationReport> rademacher_equality(std::uint64_t seed) {
  GenConfig cfg = small_config(seed);
  cfg.n = 16;
  const auto trl = gen_trl(cfg);
  const auto mcl = gen_mcl(cfg);
  const auto lcl = gen_lcl(cfg);
  const std::size_t dk = cfg.d * static_cast<std::size_t>(cfg.k);
  return {
      tagged(verify_rademacher_equality(trl.examples, random_grid(cfg.d, 64, 2.0, seed), 200, seed), "trl"),
      tagged(verify_rademacher_equality(mcl.examples, random_grid(dk, 64, 2.0, seed), 200, seed), "mcl"),
      tagged(verify_rademacher_equality(lcl.examples, random_grid(dk, 64, 2.0, seed), 200, seed), "lcl"),
  };
}

std::vector<VerificationReport> lcl_rescaling(std::uint64_t seed) {
  GenConfig cfg;
  cfg.d = 3;
  cfg.k = 5;
  cfg.theta = std::array{0.0, 0.3, 0.7, 1.0}[seed % 4];
  SampleStream stream(seed);
  const auto W = draw_planted_multiclass(stream, cfg.k, cfg.d);
  std::ostringstream suffix;
  suffix << "theta=" << cfg.theta;
  return {tagged(verify_lcl_rescaling_montecarlo(cfg, W, 10000, seed), suffix.str())};
}

std::vector<VerificationReport> solver_optimality(std::uint64_t seed) {
  GenConfig cfg = small_config(seed);
  cfg.n = 20;
  const auto reduced = reduce_sample(std::span<const MCLExample>(gen_mcl(cfg).examples));
  SolverConfig solver;
  solver.c_reg = 0.5;
  const auto result = train_oneclass_misvm(reduced.examples, solver);
  const double radius = std::max(1.0, 2.0 * result.weights.norm());
  OptimalityCheck check;
  check.seed = seed;
  return {verify_solver_optimality(reduced.examples, solver.c_reg, result,
                                   random_grid(result.weights.dim(), 10000, radius, seed), check)};
}

std::vector<VerificationReport> norm_transport(std::uint64_t seed) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.n = 200;
  cfg.d = 4;
  cfg.k = 5;
  cfg.set_size = 6;
  cfg.theta = 0.5;
  cfg.r_norm = 1.5;
  const auto trl = reduce_sample(std::span<const TRLExample>(gen_trl(cfg).examples));
  const auto mcl = reduce_sample(std::span<const MCLExample>(gen_mcl(cfg).examples));
  const auto lcl = reduce_sample(std::span<const LCLExample>(gen_lcl(cfg).examples));
  return {
      tagged(verify_norm_transport(trl.examples, 2.0 * cfg.r_norm), "trl"),
      tagged(verify_norm_transport(mcl.examples, std::sqrt(2.0) * cfg.r_norm), "mcl"),
      tagged(verify_norm_transport(lcl.examples, std::sqrt(2.0) * cfg.r_norm), "lcl"),
  };
}

std::vector<VerificationReport> dc_monotonicity(std::uint64_t seed) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.n = 30;
  cfg.d = 3;
  cfg.set_size = 4;
  const auto data = gen_mil(cfg);
  SolverConfig solver;
  solver.seed = seed;
  const auto result = train_binary_misvm_dc(data.examples, solver);
  double worst = 0.0;
  for (std::size_t t = 1; t < result.objective_trace.size(); ++t) {
    worst = std::max(worst, result.objective_trace[t] - result.objective_trace[t - 1]);
  }
  VerificationReport r;
  r.name = "dc_monotone_trace";
  r.lhs = worst;
  r.rhs = 0.0;
  r.tolerance = 1e-12;
  r.passed = worst <= 1e-12 && result.converged;
  std::ostringstream note;
  note << "largest increase " << worst << " over " << result.objective_trace.size() << " trace points; "
       << (result.converged ? "converged" : "not converged");
  r.note = note.str();
  return {r};
}

std::vector<VerificationReport> multiclass_equivalence(std::uint64_t seed) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.n = 50;
  cfg.d = 5;
  cfg.k = 4;
  cfg.margin = 0.05;
  const auto data = gen_mcl(cfg);
  SolverConfig solver;
  solver.tol = 1e-9;
  const auto reduced = reduce_sample(std::span<const MCLExample>(data.examples));
  const auto via_mil = train_oneclass_misvm(reduced.examples, solver);
  const auto direct = train_multiclass_svm_direct(data.examples, solver);
  const double lhs = objective_multiclass_svm(data.examples, mcl_restore(via_mil.weights, cfg.k), solver.c_reg);
  const double rhs = direct.objective;
  auto r = make_equality_report("multiclass_equivalence", lhs, rhs, 1e-4 * std::max(1.0, std::fabs(rhs)));
  r.note = "reduced one-class MI-SVM vs direct multi-class SVM objective";
  return {r};
}

const std::map<std::string, Check>& registry() {
  static const std::map<std::string, Check> checks = {
      {"loss-equality", loss_equality},
      {"erm-equality", erm_equality},
      {"rademacher-equality", rademacher_equality},
      {"lcl-rescaling", lcl_rescaling},
      {"solver-optimality", solver_optimality},
      {"norm-transport", norm_transport},
      {"dc-monotonicity", dc_monotonicity},
      {"multiclass-equivalence", multiclass_equivalence},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<VerificationReport> run_check(const std::string& name, std::uint64_t seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown check \"" + name + "\"");
  return it->second(seed);
}

}  // namespace ermr::cli
