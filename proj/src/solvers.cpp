#include "ermr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace ermr {

namespace {

std::size_t sample_dim(std::span<const MILExample> sample) {
  const std::size_t d = sample.front().bag().dim();
  for (const auto& ex : sample) {
    if (ex.bag().dim() != d) throw DimensionError("MI-SVM: mixed bag dimensions");
  }
  return d;
}

// Instances of all bags packed row-major, with per-bag offsets.
struct PackedBags {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> sq_norm;
  std::vector<std::size_t> offset;  // bag i owns rows [offset[i], offset[i+1])

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(x).subspan(r * dim, dim);
  }
  std::size_t bags() const { return offset.size() - 1; }
};

PackedBags pack(std::span<const MILExample> sample, std::size_t dim) {
  PackedBags p;
  p.dim = dim;
  p.offset.push_back(0);
  for (const auto& ex : sample) {
    for (const auto& inst : ex.bag()) {
      p.x.insert(p.x.end(), inst.coords().begin(), inst.coords().end());
      p.sq_norm.push_back(squared_norm(inst.coords()));
    }
    p.offset.push_back(p.sq_norm.size());
  }
  return p;
}

struct ConvexSolve {
  std::vector<double> w;
  double objective = 0.0;
  double gap = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Objective with every bag treated as negative: 1/2||w||^2 + c sum max(0, 1 + max <w,x>).
double oneclass_primal(const PackedBags& p, std::span<const double> w, double c) {
  double hinge_sum = 0.0;
  for (std::size_t b = 0; b < p.bags(); ++b) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = p.offset[b]; r < p.offset[b + 1]; ++r) best = std::max(best, dot(w, p.row(r)));
    hinge_sum += std::max(0.0, 1.0 + best);
  }
  return 0.5 * squared_norm(w) + c * hinge_sum;
}

// Dual coordinate ascent on the capped-simplex blocks. Coordinates of bag b
// are its instances plus a slack s_b = c - sum_x a_x whose gradient is 0 and
// whose vector is 0.
ConvexSolve solve_oneclass_dual(const PackedBags& p, double c, double tol, int max_sweeps) {
  const std::size_t n_rows = p.sq_norm.size();
  const std::size_t dim = p.dim;
  std::vector<double> alpha(n_rows, 0.0);
  std::vector<double> slack(p.bags(), c);
  std::vector<double> w(dim, 0.0);
  std::vector<double> grad;

  ConvexSolve out;
  constexpr double kPairEps = 1e-15;

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t b = 0; b < p.bags(); ++b) {
      const std::size_t lo = p.offset[b];
      const std::size_t hi = p.offset[b + 1];
      const std::size_t size = hi - lo;
      grad.resize(size);
      for (std::size_t step = 0; step <= size; ++step) {
        for (std::size_t j = 0; j < size; ++j) grad[j] = 1.0 + dot(w, p.row(lo + j));
        // index `size` stands for the slack coordinate
        std::size_t up = size;
        double g_up = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
          if (grad[j] > g_up) {
            g_up = grad[j];
            up = j;
          }
        }
        std::size_t down = size;
        double g_down = slack[b] > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < size; ++j) {
          if (alpha[lo + j] > 0.0 && grad[j] < g_down) {
            g_down = grad[j];
            down = j;
          }
        }
        if (up == down || !(g_up - g_down > kPairEps)) break;

        const double mass = down == size ? slack[b] : alpha[lo + down];
        double curvature = 0.0;
        if (up == size) {
          curvature = p.sq_norm[lo + down];
        } else if (down == size) {
          curvature = p.sq_norm[lo + up];
        } else {
          auto xu = p.row(lo + up);
          auto xd = p.row(lo + down);
          for (std::size_t k = 0; k < dim; ++k) {
            const double diff = xu[k] - xd[k];
            curvature += diff * diff;
          }
        }
        const double delta = curvature > 0.0 ? std::min(mass, (g_up - g_down) / curvature) : mass;
        if (!(delta > 0.0)) break;

        if (down == size) {
          slack[b] -= delta;
        } else {
          alpha[lo + down] -= delta;
          if (alpha[lo + down] < 0.0) alpha[lo + down] = 0.0;
          auto xd = p.row(lo + down);
          for (std::size_t k = 0; k < dim; ++k) w[k] += delta * xd[k];
        }
        if (up == size) {
          slack[b] += delta;
        } else {
          alpha[lo + up] += delta;
          auto xu = p.row(lo + up);
          for (std::size_t k = 0; k < dim; ++k) w[k] -= delta * xu[k];
        }
      }
    }

    // Rebuild w from alpha so rounding drift never accumulates across sweeps.
    std::fill(w.begin(), w.end(), 0.0);
    double alpha_sum = 0.0;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (alpha[r] == 0.0) continue;
      alpha_sum += alpha[r];
      auto xr = p.row(r);
      for (std::size_t k = 0; k < dim; ++k) w[k] -= alpha[r] * xr[k];
    }
    const double primal = oneclass_primal(p, w, c);
    const double dual = alpha_sum - 0.5 * squared_norm(w);
    out.trace.push_back(primal);
    out.sweeps = sweep;
    out.gap = primal - dual;
    if (out.gap <= tol * std::max(1.0, std::fabs(primal))) {
      out.converged = true;
      break;
    }
  }
  out.w = std::move(w);
  out.objective = oneclass_primal(p, out.w, c);
  return out;
}

// Norm-capped variant: the minimiser of 1/2||w||^2 + cH(w) over ||w|| <= cap
// minimises 1/2||w||^2 + (c/mu)H(w) for some mu >= 1; mu is found by bisection.
ConvexSolve solve_oneclass(const PackedBags& p, const SolverConfig& cfg) {
  ConvexSolve free_solve = solve_oneclass_dual(p, cfg.c_reg, cfg.tol, cfg.max_iters);
  const double cap = cfg.lambda_cap;
  if (std::isinf(cap) || norm(free_solve.w) <= cap) return free_solve;

  double mu_lo = 1.0;
  double mu_hi = 2.0;
  ConvexSolve best = solve_oneclass_dual(p, cfg.c_reg / mu_hi, cfg.tol, cfg.max_iters);
  int total_sweeps = free_solve.sweeps + best.sweeps;
  while (norm(best.w) > cap && mu_hi < 1e12) {
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    best = solve_oneclass_dual(p, cfg.c_reg / mu_hi, cfg.tol, cfg.max_iters);
    total_sweeps += best.sweeps;
  }
  for (int it = 0; it < 60 && mu_hi / mu_lo - 1.0 > 1e-10; ++it) {
    const double mid = std::sqrt(mu_lo * mu_hi);
    ConvexSolve trial = solve_oneclass_dual(p, cfg.c_reg / mid, cfg.tol, cfg.max_iters);
    total_sweeps += trial.sweeps;
    if (norm(trial.w) > cap) {
      mu_lo = mid;
    } else {
      mu_hi = mid;
      best = std::move(trial);
    }
  }
  const double n = norm(best.w);
  if (n > cap) {
    for (double& v : best.w) v *= cap / n;
  }
  best.sweeps = total_sweeps;
  best.objective = oneclass_primal(p, best.w, cfg.c_reg);
  return best;
}

LinearWeights to_weights(const std::vector<double>& w, double cap) {
  return LinearWeights(w, cap);
}

// Convex majoriser of the objective at w: negative bags kept, each positive
// bag replaced by the negated mean of the instances tied for its max. The mean
// is still a subgradient of the max, and at w = 0 (all tied) it is the bag
// centroid rather than an arbitrary instance.
std::vector<MILExample> linearise(std::span<const MILExample> sample, std::span<const double> w) {
  const std::size_t dim = w.size();
  std::vector<MILExample> sub;
  sub.reserve(sample.size());
  for (const auto& ex : sample) {
    if (ex.label() < 0) {
      sub.push_back(ex);
      continue;
    }
    const double top = bag_score(w, ex.bag());
    std::vector<double> flipped(dim, 0.0);
    double tied = 0.0;
    for (const auto& x : ex.bag()) {
      if (dot(w, x.coords()) != top) continue;
      for (std::size_t i = 0; i < dim; ++i) flipped[i] -= x[i];
      tied += 1.0;
    }
    for (double& v : flipped) v /= tied;
    sub.emplace_back(Bag{Instance(std::move(flipped))}, -1);
  }
  return sub;
}

// Deterministic CCCP start. w = 0 ties every instance, which makes the first
// linearisation arbitrary, so start along (mean positive centroid - mean
// negative centroid) at the best of a few scales instead; fall back to the
// first positive instance when that difference vanishes.
std::vector<double> initial_point(std::span<const MILExample> sample, const SolverConfig& cfg) {
  const std::size_t dim = sample_dim(sample);
  std::vector<double> pos(dim, 0.0), neg(dim, 0.0);
  double n_pos = 0.0, n_neg = 0.0;
  const MILExample* first_positive = nullptr;
  for (const auto& ex : sample) {
    auto& acc = ex.label() > 0 ? pos : neg;
    (ex.label() > 0 ? n_pos : n_neg) += 1.0;
    if (ex.label() > 0 && first_positive == nullptr) first_positive = &ex;
    const double m = static_cast<double>(ex.bag().size());
    for (const auto& x : ex.bag()) {
      for (std::size_t i = 0; i < dim; ++i) acc[i] += x[i] / m;
    }
  }
  std::vector<double> u(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    u[i] = (n_pos > 0 ? pos[i] / n_pos : 0.0) - (n_neg > 0 ? neg[i] / n_neg : 0.0);
  }
  double len = norm(u);
  if (len == 0.0 && first_positive != nullptr) {
    const auto c = first_positive->bag()[0].coords();
    u.assign(c.begin(), c.end());
    len = norm(u);
  }
  if (len == 0.0) return u;
  for (double& v : u) v /= len;

  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (double t = 0.125; t <= 8.0; t *= 2.0) {
    std::vector<double> w(u);
    for (double& v : w) v *= std::min(t, cfg.lambda_cap);
    const double f = objective_misvm(sample, w, cfg.c_reg);
    if (f < best_obj) {
      best_obj = f;
      best = std::move(w);
    }
  }
  return best;
}

SolverResult run_cccp(std::span<const MILExample> sample, const SolverConfig& cfg,
                      std::vector<double> w) {
  const std::size_t dim = w.size();
  double current = objective_misvm(sample, w, cfg.c_reg);
  SolverResult result{to_weights(w, cfg.lambda_cap), current, 0, {current}, false, 0.0,
                      SolverKind::kDifferenceOfConvex};
  bool inner_ok = true;
  bool outer_done = false;
  std::vector<MILExample> sub = linearise(sample, w);
  for (int outer = 1; outer <= cfg.max_outer_iters; ++outer) {
    ConvexSolve step = solve_oneclass(pack(sub, dim), cfg);
    result.iterations = outer;
    result.duality_gap = step.gap;
    inner_ok = inner_ok && step.converged;

    const double next = objective_misvm(sample, step.w, cfg.c_reg);
    if (next > current) {
      // The subproblem was solved only to tolerance; keep the incumbent.
      outer_done = true;
      break;
    }
    const double decrease = current - next;
    w = std::move(step.w);
    current = next;
    result.objective_trace.push_back(current);
    auto next_sub = linearise(sample, w);
    // A small decrease alone can come from a degenerate linearisation (w near
    // 0); stop only once the majoriser has also stopped moving.
    const bool fixed = next_sub == sub;
    sub = std::move(next_sub);
    if (decrease < cfg.dc_epsilon && fixed) {
      outer_done = true;
      break;
    }
  }
  result.weights = to_weights(w, cfg.lambda_cap);
  result.objective = current;
  result.converged = outer_done && inner_ok;
  return result;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(c_reg > 0.0)) throw std::invalid_argument("SolverConfig: c_reg must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(dc_epsilon > 0.0)) throw std::invalid_argument("SolverConfig: dc_epsilon must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("SolverConfig: max_outer_iters must be >= 1");
  if (restarts < 0) throw std::invalid_argument("SolverConfig: restarts must be >= 0");
  if (!(lambda_cap > 0.0)) throw std::invalid_argument("SolverConfig: lambda_cap must be positive");
}

const char* to_string(SolverKind kind) {
  return kind == SolverKind::kOneClass ? "oneclass" : "dc";
}

double objective_misvm(std::span<const MILExample> sample, std::span<const double> w,
                       double c_reg) {
  if (sample.empty()) throw std::invalid_argument("objective_misvm: empty sample");
  if (!(c_reg > 0.0)) throw std::invalid_argument("objective_misvm: c_reg must be positive");
  double hinge_sum = 0.0;
  for (const auto& ex : sample) hinge_sum += hinge(ex.label(), bag_score(w, ex.bag()));
  return 0.5 * squared_norm(w) + c_reg * hinge_sum;
}

double objective_misvm(std::span<const MILExample> sample, const LinearWeights& w,
                       double c_reg) {
  return objective_misvm(sample, w.values(), c_reg);
}

SolverResult train_oneclass_misvm(std::span<const MILExample> sample, const SolverConfig& config) {
  config.validate();
  if (sample.empty()) throw std::invalid_argument("train_oneclass_misvm: empty sample");
  for (const auto& ex : sample) {
    if (ex.label() != -1) throw std::invalid_argument("train_oneclass_misvm: every label must be -1");
  }
  const PackedBags packed = pack(sample, sample_dim(sample));
  ConvexSolve solve = solve_oneclass(packed, config);
  SolverResult result{to_weights(solve.w, config.lambda_cap), 0.0, solve.sweeps,
                      std::move(solve.trace), solve.converged, solve.gap, SolverKind::kOneClass};
  result.objective = objective_misvm(sample, result.weights, config.c_reg);
  return result;
}

SolverResult train_binary_misvm_dc(std::span<const MILExample> sample, const SolverConfig& config) {
  config.validate();
  if (sample.empty()) throw std::invalid_argument("train_binary_misvm_dc: empty sample");
  const std::size_t dim = sample_dim(sample);
  const bool any_positive =
      std::any_of(sample.begin(), sample.end(), [](const MILExample& ex) { return ex.label() > 0; });
  if (!any_positive) return train_oneclass_misvm(sample, config);

  SolverResult best = run_cccp(sample, config, initial_point(sample, config));
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < config.restarts; ++r) {
    std::vector<double> start(dim);
    for (double& v : start) v = normal(rng);
    const double n = norm(start);
    if (!std::isinf(config.lambda_cap) && n > config.lambda_cap) {
      for (double& v : start) v *= config.lambda_cap / n;
    }
    SolverResult candidate = run_cccp(sample, config, std::move(start));
    if (candidate.objective < best.objective) best = std::move(candidate);
  }
  return best;
}

SolverResult train_misvm(std::span<const MILExample> sample, const SolverConfig& config) {
  if (sample.empty()) throw std::invalid_argument("train_misvm: empty sample");
  const bool all_negative =
      std::all_of(sample.begin(), sample.end(), [](const MILExample& ex) { return ex.label() < 0; });
  return all_negative ? train_oneclass_misvm(sample, config) : train_binary_misvm_dc(sample, config);
}

double objective_multiclass_svm(std::span<const MCLExample> sample, const MulticlassWeights& W,
                                double c_reg) {
  if (sample.empty()) throw std::invalid_argument("objective_multiclass_svm: empty sample");
  double hinge_sum = 0.0;
  for (const auto& ex : sample) {
    if (ex.classes() != W.classes()) throw DimensionError("objective_multiclass_svm: class count mismatch");
    hinge_sum += std::max(0.0, 1.0 + multiclass_margin_violation(W, ex.x(), ex.label()));
  }
  return 0.5 * squared_norm(W.flat()) + c_reg * hinge_sum;
}

namespace {

// argmin 1/2 A sum a_m^2 + sum B_m a_m  s.t.  a_m <= C[m == y], sum a_m = 0.
void crammer_singer_block(double a_sq, int y, double c, const std::vector<double>& b,
                          std::vector<double>& scratch, std::vector<double>& alpha_new) {
  const std::size_t k = b.size();
  scratch = b;
  scratch[static_cast<std::size_t>(y)] += a_sq * c;
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double beta = scratch[0] - a_sq * c;
  std::size_t r = 1;
  for (; r < k && beta < static_cast<double>(r) * scratch[r]; ++r) beta += scratch[r];
  beta /= static_cast<double>(r);
  for (std::size_t m = 0; m < k; ++m) {
    const double unclipped = (beta - b[m]) / a_sq;
    alpha_new[m] = static_cast<int>(m) == y ? std::min(c, unclipped) : std::min(0.0, unclipped);
  }
}

}  // namespace

MulticlassResult train_multiclass_svm_direct(std::span<const MCLExample> sample,
                                             const SolverConfig& config) {
  config.validate();
  if (sample.empty()) throw std::invalid_argument("train_multiclass_svm_direct: empty sample");
  if (!std::isinf(config.lambda_cap)) {
    throw std::invalid_argument("train_multiclass_svm_direct: only the uncapped problem is supported");
  }
  const int classes = sample.front().classes();
  const std::size_t d = sample.front().x().dim();
  for (const auto& ex : sample) {
    if (ex.classes() != classes || ex.x().dim() != d) {
      throw DimensionError("train_multiclass_svm_direct: mixed class counts or dimensions");
    }
  }
  const auto k = static_cast<std::size_t>(classes);
  const double c = config.c_reg;
  const std::size_t n = sample.size();

  std::vector<double> alpha(n * k, 0.0);
  std::vector<double> w(k * d, 0.0);
  std::vector<double> b(k), scratch(k), alpha_new(k);
  auto row = [&](std::size_t m) { return std::span<double>(w).subspan(m * d, d); };

  MulticlassResult result{MulticlassWeights::zeros(classes, d), 0.0, 0, false, 0.0};
  for (int epoch = 1; epoch <= config.max_iters; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = sample[i].x().coords();
      const double a_sq = squared_norm(x);
      if (a_sq == 0.0) continue;
      const int y = sample[i].label() - 1;
      double* a = &alpha[i * k];
      for (std::size_t m = 0; m < k; ++m) {
        const double g = dot(row(m), x) + (static_cast<int>(m) == y ? 0.0 : 1.0);
        b[m] = g - a_sq * a[m];
      }
      crammer_singer_block(a_sq, y, c, b, scratch, alpha_new);
      for (std::size_t m = 0; m < k; ++m) {
        const double delta = alpha_new[m] - a[m];
        if (delta == 0.0) continue;
        a[m] = alpha_new[m];
        auto wm = row(m);
        for (std::size_t j = 0; j < d; ++j) wm[j] += delta * x[j];
      }
    }

    std::fill(w.begin(), w.end(), 0.0);
    double dual_linear = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = sample[i].x().coords();
      dual_linear += alpha[i * k + static_cast<std::size_t>(sample[i].label() - 1)];
      for (std::size_t m = 0; m < k; ++m) {
        const double a = alpha[i * k + m];
        if (a == 0.0) continue;
        auto wm = row(m);
        for (std::size_t j = 0; j < d; ++j) wm[j] += a * x[j];
      }
    }
    MulticlassWeights W(classes, d, w);
    const double primal = objective_multiclass_svm(sample, W, c);
    const double dual = dual_linear - 0.5 * squared_norm(w);
    result.weights = std::move(W);
    result.objective = primal;
    result.iterations = epoch;
    result.duality_gap = primal - dual;
    if (result.duality_gap <= config.tol * std::max(1.0, std::fabs(primal))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace ermr
