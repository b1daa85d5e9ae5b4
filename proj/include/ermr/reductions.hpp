#ifndef ERMR_REDUCTIONS_HPP
#define ERMR_REDUCTIONS_HPP

// Example transforms (alpha) and hypothesis transforms (beta) taking top-1
// ranking, multi-class, and labeled/complementarily-labeled problems to
// binary multiple-instance learning over g_w(B) = max_{x in B} <w, x>.
//
//   TRL: (A, x*)        -> ({x - x* : x in A \ x*}, -1),  beta = identity
//   MCL: (x, y)         -> ({z(x,y') - z(x,y) : y' != y}, -1)
//   LCL: (x, (y, gamma)) -> (same bag as MCL, -1 if gamma else +1)
//
// z(x, y) places x in the y-th d-sized block of a d*k vector; for MCL/LCL
// beta splits the d*k weight vector into k rows.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ermr/core.hpp"
#include "ermr/report.hpp"

namespace ermr {

enum class ProblemKind { kMIL, kTRL, kMCL, kLCL };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& text);

using Dataset = std::variant<std::vector<MILExample>, std::vector<TRLExample>,
                             std::vector<MCLExample>, std::vector<LCLExample>>;

ProblemKind kind_of(const Dataset& data);
std::size_t size_of(const Dataset& data);

struct ReducedSample {
  std::vector<MILExample> examples;
  ProblemKind source = ProblemKind::kMIL;
  int classes = 0;          // k for MCL/LCL, 0 otherwise
  std::size_t dim = 0;      // original instance dimension d (0 if unknown)
  std::size_t skipped_count = 0;
  std::vector<std::size_t> source_index;  // original index of each reduced example
};

/// nullopt when |A| = 1: the competitor set is empty and the example is
/// dropped from reduced samples.
std::optional<MILExample> trl_reduce(const TRLExample& ex);

/// Ranking hypothesis h_w: A -> argmax_{x in A} <w, x> (lowest index on ties).
class RankingHypothesis {
 public:
  explicit RankingHypothesis(LinearWeights w) : w_(std::move(w)) {}
  const LinearWeights& weights() const { return w_; }
  std::size_t predict(std::span<const Instance> items) const { return top1_predict(w_, items); }
  int loss(const TRLExample& ex) const { return trl_loss(w_, ex); }

 private:
  LinearWeights w_;
};

RankingHypothesis trl_restore(const LinearWeights& w);

Instance mcl_embed(const Instance& x, int label, int classes);
MILExample mcl_reduce(const MCLExample& ex);
MulticlassWeights mcl_restore(const LinearWeights& omega, int classes);
LinearWeights flatten(const MulticlassWeights& W);

/// -1 for ordinary labels, +1 for complementary labels.
int lcl_bag_label(bool is_true);
MILExample lcl_reduce(const LCLExample& ex);

ReducedSample reduce_sample(std::span<const TRLExample> sample);
ReducedSample reduce_sample(std::span<const MCLExample> sample);
ReducedSample reduce_sample(std::span<const LCLExample> sample);
/// Dispatches on the dataset's alternative; throws if it is not `kind`.
ReducedSample reduce_sample(const Dataset& data, ProblemKind kind);

/// Original 0/1 loss versus reduced l_b(y', g(B')) under the corresponding
/// reduced weights; passes only on exact equality.
VerificationReport check_loss_equality(const TRLExample& ex, const LinearWeights& w);
VerificationReport check_loss_equality(const MCLExample& ex, const MulticlassWeights& W);
VerificationReport check_loss_equality(const LCLExample& ex, const MulticlassWeights& W);

}  // namespace ermr

#endif  // ERMR_REDUCTIONS_HPP
