#include "ermr/datagen.hpp"

#include <algorithm>
#include <cmath>

namespace ermr {

namespace {

double top_gap(std::span<const double> scores, std::size_t best) {
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != best) second = std::max(second, scores[i]);
  }
  return scores[best] - second;
}

std::size_t argmax_lowest(std::span<const double> scores) {
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

void reject_limit(int attempts, const GenConfig& cfg, const char* what) {
  if (attempts >= cfg.max_rejections) {
    throw std::runtime_error(std::string(what) + ": margin rejection sampling exhausted");
  }
}

LinearWeights unit_direction(SampleStream& stream, std::size_t d) {
  auto v = stream.gaussian(d);
  double n = norm(v);
  if (n == 0.0) {
    v[0] = 1.0;
    n = 1.0;
  }
  for (double& c : v) c /= n;
  return LinearWeights(std::move(v));
}

}  // namespace

void GenConfig::validate() const {
  if (n < 1) throw std::invalid_argument("GenConfig: n must be >= 1");
  if (d < 1) throw std::invalid_argument("GenConfig: d must be >= 1");
  if (k < 2) throw std::invalid_argument("GenConfig: k must be >= 2");
  if (set_size < 1) throw std::invalid_argument("GenConfig: set_size must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("GenConfig: theta must lie in [0,1]");
  if (!(r_norm > 0.0)) throw std::invalid_argument("GenConfig: r_norm must be positive");
  if (margin && !(*margin >= 0.0)) throw std::invalid_argument("GenConfig: margin must be >= 0");
  if (max_rejections < 1) throw std::invalid_argument("GenConfig: max_rejections must be >= 1");
}

Instance SampleStream::uniform_in_ball(std::size_t d, double radius) {
  std::vector<double> v(d);
  double n = 0.0;
  do {
    for (double& c : v) c = normal_(rng_);
    n = norm(v);
  } while (n == 0.0);
  const double r = radius * std::pow(unit_(rng_), 1.0 / static_cast<double>(d));
  for (double& c : v) c *= r / n;
  // Rounding can push the norm a hair past the radius.
  const double m = norm(v);
  if (m > radius) {
    for (double& c : v) c *= radius / m;
  }
  return Instance(std::move(v));
}

std::vector<double> SampleStream::gaussian(std::size_t count) {
  std::vector<double> v(count);
  for (double& c : v) c = normal_(rng_);
  return v;
}

MILData gen_mil(const GenConfig& cfg) {
  cfg.validate();
  SampleStream stream(cfg.seed);
  LinearWeights planted = unit_direction(stream, cfg.d);
  std::vector<MILExample> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    for (int attempt = 0;; ++attempt) {
      reject_limit(attempt, cfg, "gen_mil");
      std::vector<Instance> bag;
      for (std::size_t j = 0; j < cfg.set_size; ++j) bag.push_back(stream.uniform_in_ball(cfg.d, cfg.r_norm));
      Bag b(std::move(bag));
      const double score = bag_score(planted, b) - cfg.mil_threshold;
      if (cfg.margin && std::fabs(score) < *cfg.margin) continue;
      out.emplace_back(std::move(b), score > 0.0 ? 1 : -1);
      break;
    }
  }
  return {std::move(out), std::move(planted)};
}

TRLData gen_trl(const GenConfig& cfg) {
  cfg.validate();
  SampleStream stream(cfg.seed);
  LinearWeights planted = unit_direction(stream, cfg.d);
  std::vector<TRLExample> out;
  out.reserve(cfg.n);
  std::vector<double> scores;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    for (int attempt = 0;; ++attempt) {
      reject_limit(attempt, cfg, "gen_trl");
      std::vector<Instance> items;
      scores.clear();
      for (std::size_t j = 0; j < cfg.set_size; ++j) {
        items.push_back(stream.uniform_in_ball(cfg.d, cfg.r_norm));
        scores.push_back(dot(planted.values(), items.back().coords()));
      }
      const std::size_t best = argmax_lowest(scores);
      if (cfg.margin && items.size() > 1 && top_gap(scores, best) < *cfg.margin) continue;
      out.emplace_back(std::move(items), best);
      break;
    }
  }
  return {std::move(out), std::move(planted)};
}

MulticlassWeights draw_planted_multiclass(SampleStream& stream, int k, std::size_t d) {
  return MulticlassWeights(k, d, stream.gaussian(static_cast<std::size_t>(k) * d));
}

MCLExample draw_multiclass(SampleStream& stream, const GenConfig& cfg, const MulticlassWeights& planted) {
  std::vector<double> scores(static_cast<std::size_t>(cfg.k));
  for (int attempt = 0;; ++attempt) {
    reject_limit(attempt, cfg, "gen_mcl");
    Instance x = stream.uniform_in_ball(cfg.d, cfg.r_norm);
    for (int y = 1; y <= cfg.k; ++y) scores[static_cast<std::size_t>(y - 1)] = dot(planted.row(y), x.coords());
    const std::size_t best = argmax_lowest(scores);
    if (cfg.margin && top_gap(scores, best) < *cfg.margin) continue;
    return MCLExample(std::move(x), static_cast<int>(best) + 1, cfg.k);
  }
}

MCLData gen_mcl(const GenConfig& cfg) {
  cfg.validate();
  SampleStream stream(cfg.seed);
  MulticlassWeights planted = draw_planted_multiclass(stream, cfg.k, cfg.d);
  std::vector<MCLExample> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) out.push_back(draw_multiclass(stream, cfg, planted));
  return {std::move(out), std::move(planted)};
}

LCLExample draw_complementary(SampleStream& stream, const MCLExample& truth, double theta) {
  // Always consume both draws so the stream layout does not depend on theta.
  const double u = stream.uniform01();
  const int offset = stream.uniform_int(1, truth.classes() - 1);
  if (u < theta) return LCLExample(truth.x(), truth.label(), true, truth.classes());
  // Labels other than y, enumerated cyclically from y + 1.
  const int other = (truth.label() - 1 + offset) % truth.classes() + 1;
  return LCLExample(truth.x(), other, false, truth.classes());
}

LCLData gen_lcl(const GenConfig& cfg) {
  cfg.validate();
  SampleStream stream(cfg.seed);
  MulticlassWeights planted = draw_planted_multiclass(stream, cfg.k, cfg.d);
  LCLData data{{}, {}, planted};
  data.examples.reserve(cfg.n);
  data.true_labels.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    MCLExample truth = draw_multiclass(stream, cfg, planted);
    data.true_labels.push_back(truth.label());
    data.examples.push_back(draw_complementary(stream, truth, cfg.theta));
  }
  return data;
}

}  // namespace ermr
