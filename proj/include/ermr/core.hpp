#ifndef ERMR_CORE_HPP
#define ERMR_CORE_HPP

// Domain types and 0/1 losses shared by every other part of the library.
//
// Class labels for multi-class problems are 1-based (1..k) at the API
// surface. Binary labels are -1 / +1. All losses use the margin form with
// "<= 0", so ties always count as errors.

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ermr {

inline constexpr double kUncapped = std::numeric_limits<double>::infinity();

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);

class Instance {
 public:
  explicit Instance(std::vector<double> coords);
  Instance(std::initializer_list<double> coords);

  std::size_t dim() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  double norm() const { return ermr::norm(coords_); }

  friend bool operator==(const Instance&, const Instance&) = default;
  friend auto operator<=>(const Instance&, const Instance&) = default;

 private:
  std::vector<double> coords_;
};

/// Nonempty multiset of equal-dimension instances.
class Bag {
 public:
  explicit Bag(std::vector<Instance> instances);
  Bag(std::initializer_list<Instance> instances);

  std::size_t size() const { return instances_.size(); }
  std::size_t dim() const { return instances_.front().dim(); }
  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  auto begin() const { return instances_.begin(); }
  auto end() const { return instances_.end(); }

  friend bool operator==(const Bag&, const Bag&) = default;

 private:
  std::vector<Instance> instances_;
};

class MILExample {
 public:
  MILExample(Bag bag, int label);

  const Bag& bag() const { return bag_; }
  int label() const { return label_; }

  friend bool operator==(const MILExample&, const MILExample&) = default;

 private:
  Bag bag_;
  int label_;
};

/// Weight vector with a norm cap; construction rejects ||w|| > cap.
class LinearWeights {
 public:
  explicit LinearWeights(std::vector<double> w, double lambda_cap = kUncapped);
  LinearWeights(std::initializer_list<double> w);

  static LinearWeights zeros(std::size_t dim, double lambda_cap = kUncapped);

  std::size_t dim() const { return w_.size(); }
  std::span<const double> values() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  double lambda_cap() const { return lambda_cap_; }
  double norm() const { return ermr::norm(w_); }
  LinearWeights scaled(double c) const;

  friend bool operator==(const LinearWeights&, const LinearWeights&) = default;

 private:
  std::vector<double> w_;
  double lambda_cap_;
};

/// The set A and the index of the selected item x* within it.
class TRLExample {
 public:
  TRLExample(std::vector<Instance> items, std::size_t target_index);

  const std::vector<Instance>& items() const { return items_; }
  std::size_t target_index() const { return target_; }
  const Instance& target() const { return items_[target_]; }
  std::size_t dim() const { return items_.front().dim(); }

  friend bool operator==(const TRLExample&, const TRLExample&) = default;

 private:
  std::vector<Instance> items_;
  std::size_t target_;
};

class MCLExample {
 public:
  MCLExample(Instance x, int label, int classes);

  const Instance& x() const { return x_; }
  int label() const { return label_; }
  int classes() const { return classes_; }

  friend bool operator==(const MCLExample&, const MCLExample&) = default;

 private:
  Instance x_;
  int label_;
  int classes_;
};

/// is_true = true: label is the ordinary label. false: label is one the
/// instance does NOT belong to.
class LCLExample {
 public:
  LCLExample(Instance x, int label, bool is_true, int classes);

  const Instance& x() const { return x_; }
  int label() const { return label_; }
  bool is_true() const { return is_true_; }
  int classes() const { return classes_; }

  friend bool operator==(const LCLExample&, const LCLExample&) = default;

 private:
  Instance x_;
  int label_;
  bool is_true_;
  int classes_;
};

/// k rows of d weights stored row-major; the flat storage is exactly the
/// concatenated vector used by the multi-class reductions.
class MulticlassWeights {
 public:
  MulticlassWeights(std::vector<std::vector<double>> rows,
                    double lambda_cap = kUncapped);
  MulticlassWeights(int classes, std::size_t dim, std::vector<double> flat,
                    double lambda_cap = kUncapped);

  static MulticlassWeights zeros(int classes, std::size_t dim,
                                 double lambda_cap = kUncapped);

  int classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  /// Row for a 1-based class label.
  std::span<const double> row(int label) const;
  std::span<const double> flat() const { return flat_; }
  double lambda_cap() const { return lambda_cap_; }
  double norm() const { return ermr::norm(flat_); }

  friend bool operator==(const MulticlassWeights&,
                         const MulticlassWeights&) = default;

 private:
  int classes_;
  std::size_t dim_;
  std::vector<double> flat_;
  double lambda_cap_;
};

// --- scoring and losses ----------------------------------------------------

double bag_score(std::span<const double> w, const Bag& bag);
double bag_score(const LinearWeights& w, const Bag& bag);

/// Lowest index attaining max_x <w, x>.
std::size_t bag_witness(std::span<const double> w, const Bag& bag);

int zero_one_binary(int y, double score);
double hinge(int y, double score);

enum class BinaryLoss { kZeroOne, kHinge };

double binary_loss(BinaryLoss loss, int y, double score);

double empirical_risk_mil(std::span<const MILExample> sample,
                          const LinearWeights& w, BinaryLoss loss);

std::size_t top1_predict(const LinearWeights& w,
                         std::span<const Instance> items);
int trl_loss(const LinearWeights& w, const TRLExample& ex);

/// 1-based argmax_y <w_y, x>, lowest label on ties.
int multiclass_predict(const MulticlassWeights& W, const Instance& x);

/// max_{y' != y} <w_{y'} - w_y, x>; negative iff y strictly wins.
double multiclass_margin_violation(const MulticlassWeights& W,
                                   const Instance& x, int label);

int mcl_loss(const MulticlassWeights& W, const MCLExample& ex);
int lcl_loss(const MulticlassWeights& W, const LCLExample& ex);

double empirical_risk_trl(std::span<const TRLExample> sample,
                          const LinearWeights& w);
double empirical_risk_mcl(std::span<const MCLExample> sample,
                          const MulticlassWeights& W);
double empirical_risk_lcl(std::span<const LCLExample> sample,
                          const MulticlassWeights& W);

}  // namespace ermr

#endif  // ERMR_CORE_HPP
