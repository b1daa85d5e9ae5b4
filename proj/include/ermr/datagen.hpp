#ifndef ERMR_DATAGEN_HPP
#define ERMR_DATAGEN_HPP

// Seeded synthetic data. Features are uniform in the ball of radius r_norm;
// labels come from a planted linear rule that is returned alongside the
// sample. A positive margin turns on rejection sampling so the planted rule
// separates the sample with that gap.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ermr/core.hpp"

namespace ermr {

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::size_t d = 2;
  int k = 2;
  std::size_t set_size = 4;  // items per TRL set, instances per MIL bag
  double theta = 1.0;        // probability of an ordinary label (LCL)
  double r_norm = 1.0;
  std::optional<double> margin;
  double mil_threshold = 0.5;  // MIL label is +1 iff max_x <w*, x> > threshold (||w*|| = 1)
  int max_rejections = 100000;

  void validate() const;
};

/// One random stream; all generators draw from it in a fixed order.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : rng_(seed) {}

  Instance uniform_in_ball(std::size_t d, double radius);
  std::vector<double> gaussian(std::size_t count);
  double uniform01() { return unit_(rng_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct MILData {
  std::vector<MILExample> examples;
  LinearWeights planted;
};

struct TRLData {
  std::vector<TRLExample> examples;
  LinearWeights planted;
};

struct MCLData {
  std::vector<MCLExample> examples;
  MulticlassWeights planted;
};

struct LCLData {
  std::vector<LCLExample> examples;
  /// Out-of-band ordinary labels, for risk-rescaling verification only.
  std::vector<int> true_labels;
  MulticlassWeights planted;
};

MILData gen_mil(const GenConfig& cfg);
TRLData gen_trl(const GenConfig& cfg);
MCLData gen_mcl(const GenConfig& cfg);
LCLData gen_lcl(const GenConfig& cfg);

/// Draws (x, y) from the multi-class law of gen_mcl using an external stream;
/// shared by gen_lcl and the Monte-Carlo verifiers.
MCLExample draw_multiclass(SampleStream& stream, const GenConfig& cfg, const MulticlassWeights& planted);
MulticlassWeights draw_planted_multiclass(SampleStream& stream, int k, std::size_t d);
/// Emits (x, y_true, true) with probability theta, else (x, ybar, false) with
/// ybar uniform over the k - 1 other labels.
LCLExample draw_complementary(SampleStream& stream, const MCLExample& truth, double theta);

}  // namespace ermr

#endif  // ERMR_DATAGEN_HPP
