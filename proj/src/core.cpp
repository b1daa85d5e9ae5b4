#include "ermr/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ermr {

namespace {

// Accepts ||w|| <= cap up to rounding of the norm computation itself.
bool within_cap(double norm_value, double cap) {
  if (std::isinf(cap)) return true;
  return norm_value <= cap + 1e-12 * std::max(1.0, cap);
}

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(msg.str());
  }
}

void require_label(int label, int classes, const char* what) {
  if (classes < 2) {
    throw std::invalid_argument(std::string(what) + ": need at least 2 classes");
  }
  if (label < 1 || label > classes) {
    std::ostringstream msg;
    msg << what << ": label " << label << " outside 1.." << classes;
    throw std::out_of_range(msg.str());
  }
}

void require_cap(double norm_value, double cap, const char* what) {
  if (!(cap > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": lambda_cap must be positive");
  }
  if (!within_cap(norm_value, cap)) {
    std::ostringstream msg;
    msg << what << ": norm " << norm_value << " exceeds cap " << cap;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

Instance::Instance(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DimensionError("Instance: dimension must be >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("Instance: non-finite coordinate");
  }
}

Instance::Instance(std::initializer_list<double> coords)
    : Instance(std::vector<double>(coords)) {}

Bag::Bag(std::vector<Instance> instances) : instances_(std::move(instances)) {
  if (instances_.empty()) throw std::invalid_argument("Bag: must contain at least one instance");
  for (const auto& x : instances_) require_dim(x.dim(), instances_.front().dim(), "Bag");
}

Bag::Bag(std::initializer_list<Instance> instances)
    : Bag(std::vector<Instance>(instances)) {}

MILExample::MILExample(Bag bag, int label) : bag_(std::move(bag)), label_(label) {
  if (label_ != -1 && label_ != 1) throw std::invalid_argument("MILExample: label must be -1 or +1");
}

LinearWeights::LinearWeights(std::vector<double> w, double lambda_cap)
    : w_(std::move(w)), lambda_cap_(lambda_cap) {
  if (w_.empty()) throw DimensionError("LinearWeights: dimension must be >= 1");
  for (double c : w_) {
    if (!std::isfinite(c)) throw std::invalid_argument("LinearWeights: non-finite weight");
  }
  require_cap(ermr::norm(w_), lambda_cap_, "LinearWeights");
}

LinearWeights::LinearWeights(std::initializer_list<double> w)
    : LinearWeights(std::vector<double>(w)) {}

LinearWeights LinearWeights::zeros(std::size_t dim, double lambda_cap) {
  return LinearWeights(std::vector<double>(dim, 0.0), lambda_cap);
}

LinearWeights LinearWeights::scaled(double c) const {
  std::vector<double> out(w_);
  for (double& v : out) v *= c;
  return LinearWeights(std::move(out), kUncapped);
}

TRLExample::TRLExample(std::vector<Instance> items, std::size_t target_index)
    : items_(std::move(items)), target_(target_index) {
  if (items_.empty()) throw std::invalid_argument("TRLExample: item set must be nonempty");
  if (target_ >= items_.size()) throw std::out_of_range("TRLExample: target_index out of range");
  for (const auto& x : items_) require_dim(x.dim(), items_.front().dim(), "TRLExample");
}

MCLExample::MCLExample(Instance x, int label, int classes)
    : x_(std::move(x)), label_(label), classes_(classes) {
  require_label(label_, classes_, "MCLExample");
}

LCLExample::LCLExample(Instance x, int label, bool is_true, int classes)
    : x_(std::move(x)), label_(label), is_true_(is_true), classes_(classes) {
  require_label(label_, classes_, "LCLExample");
}

MulticlassWeights::MulticlassWeights(std::vector<std::vector<double>> rows,
                                     double lambda_cap)
    : classes_(static_cast<int>(rows.size())),
      dim_(rows.empty() ? 0 : rows.front().size()),
      lambda_cap_(lambda_cap) {
  if (classes_ < 2) throw std::invalid_argument("MulticlassWeights: need at least 2 rows");
  if (dim_ == 0) throw DimensionError("MulticlassWeights: dimension must be >= 1");
  flat_.reserve(rows.size() * dim_);
  for (const auto& r : rows) {
    require_dim(r.size(), dim_, "MulticlassWeights");
    flat_.insert(flat_.end(), r.begin(), r.end());
  }
  for (double c : flat_) {
    if (!std::isfinite(c)) throw std::invalid_argument("MulticlassWeights: non-finite weight");
  }
  require_cap(ermr::norm(flat_), lambda_cap_, "MulticlassWeights");
}

MulticlassWeights::MulticlassWeights(int classes, std::size_t dim,
                                     std::vector<double> flat, double lambda_cap)
    : classes_(classes), dim_(dim), flat_(std::move(flat)), lambda_cap_(lambda_cap) {
  if (classes_ < 2) throw std::invalid_argument("MulticlassWeights: need at least 2 classes");
  if (dim_ == 0) throw DimensionError("MulticlassWeights: dimension must be >= 1");
  require_dim(flat_.size(), static_cast<std::size_t>(classes_) * dim_, "MulticlassWeights");
  for (double c : flat_) {
    if (!std::isfinite(c)) throw std::invalid_argument("MulticlassWeights: non-finite weight");
  }
  require_cap(ermr::norm(flat_), lambda_cap_, "MulticlassWeights");
}

MulticlassWeights MulticlassWeights::zeros(int classes, std::size_t dim,
                                           double lambda_cap) {
  return MulticlassWeights(classes, dim,
                           std::vector<double>(static_cast<std::size_t>(classes) * dim, 0.0),
                           lambda_cap);
}

std::span<const double> MulticlassWeights::row(int label) const {
  if (label < 1 || label > classes_) throw std::out_of_range("MulticlassWeights::row: bad label");
  return std::span<const double>(flat_).subspan(static_cast<std::size_t>(label - 1) * dim_, dim_);
}

double bag_score(std::span<const double> w, const Bag& bag) {
  require_dim(w.size(), bag.dim(), "bag_score");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : bag) best = std::max(best, dot(w, x.coords()));
  return best;
}

double bag_score(const LinearWeights& w, const Bag& bag) {
  return bag_score(w.values(), bag);
}

std::size_t bag_witness(std::span<const double> w, const Bag& bag) {
  require_dim(w.size(), bag.dim(), "bag_witness");
  std::size_t best_index = 0;
  double best = dot(w, bag[0].coords());
  for (std::size_t i = 1; i < bag.size(); ++i) {
    const double s = dot(w, bag[i].coords());
    if (s > best) {
      best = s;
      best_index = i;
    }
  }
  return best_index;
}

int zero_one_binary(int y, double score) { return y * score <= 0.0 ? 1 : 0; }

double hinge(int y, double score) { return std::max(0.0, 1.0 - y * score); }

double binary_loss(BinaryLoss loss, int y, double score) {
  return loss == BinaryLoss::kZeroOne ? zero_one_binary(y, score) : hinge(y, score);
}

double empirical_risk_mil(std::span<const MILExample> sample,
                          const LinearWeights& w, BinaryLoss loss) {
  if (sample.empty()) throw std::invalid_argument("empirical_risk_mil: empty sample");
  double total = 0.0;
  for (const auto& ex : sample) total += binary_loss(loss, ex.label(), bag_score(w, ex.bag()));
  return total / static_cast<double>(sample.size());
}

std::size_t top1_predict(const LinearWeights& w, std::span<const Instance> items) {
  if (items.empty()) throw std::invalid_argument("top1_predict: empty item set");
  std::size_t best_index = 0;
  require_dim(w.dim(), items[0].dim(), "top1_predict");
  double best = dot(w.values(), items[0].coords());
  for (std::size_t i = 1; i < items.size(); ++i) {
    require_dim(w.dim(), items[i].dim(), "top1_predict");
    const double s = dot(w.values(), items[i].coords());
    if (s > best) {
      best = s;
      best_index = i;
    }
  }
  return best_index;
}

int trl_loss(const LinearWeights& w, const TRLExample& ex) {
  require_dim(w.dim(), ex.dim(), "trl_loss");
  const auto& items = ex.items();
  if (items.size() == 1) return 0;
  const double target = dot(w.values(), ex.target().coords());
  double competitor = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == ex.target_index()) continue;
    competitor = std::max(competitor, dot(w.values(), items[i].coords()));
  }
  return target - competitor <= 0.0 ? 1 : 0;
}

int multiclass_predict(const MulticlassWeights& W, const Instance& x) {
  require_dim(W.dim(), x.dim(), "multiclass_predict");
  int best_label = 1;
  double best = dot(W.row(1), x.coords());
  for (int y = 2; y <= W.classes(); ++y) {
    const double s = dot(W.row(y), x.coords());
    if (s > best) {
      best = s;
      best_label = y;
    }
  }
  return best_label;
}

double multiclass_margin_violation(const MulticlassWeights& W,
                                   const Instance& x, int label) {
  require_dim(W.dim(), x.dim(), "multiclass_margin_violation");
  require_label(label, W.classes(), "multiclass_margin_violation");
  const double own = dot(W.row(label), x.coords());
  double best = -std::numeric_limits<double>::infinity();
  for (int y = 1; y <= W.classes(); ++y) {
    if (y == label) continue;
    best = std::max(best, dot(W.row(y), x.coords()) - own);
  }
  return best;
}

int mcl_loss(const MulticlassWeights& W, const MCLExample& ex) {
  if (W.classes() != ex.classes()) throw DimensionError("mcl_loss: class count mismatch");
  return -multiclass_margin_violation(W, ex.x(), ex.label()) <= 0.0 ? 1 : 0;
}

int lcl_loss(const MulticlassWeights& W, const LCLExample& ex) {
  if (W.classes() != ex.classes()) throw DimensionError("lcl_loss: class count mismatch");
  const double violation = multiclass_margin_violation(W, ex.x(), ex.label());
  if (ex.is_true()) return -violation <= 0.0 ? 1 : 0;
  return violation <= 0.0 ? 1 : 0;
}

double empirical_risk_trl(std::span<const TRLExample> sample, const LinearWeights& w) {
  if (sample.empty()) throw std::invalid_argument("empirical_risk_trl: empty sample");
  long errors = 0;
  for (const auto& ex : sample) errors += trl_loss(w, ex);
  return static_cast<double>(errors) / static_cast<double>(sample.size());
}

double empirical_risk_mcl(std::span<const MCLExample> sample, const MulticlassWeights& W) {
  if (sample.empty()) throw std::invalid_argument("empirical_risk_mcl: empty sample");
  long errors = 0;
  for (const auto& ex : sample) errors += mcl_loss(W, ex);
  return static_cast<double>(errors) / static_cast<double>(sample.size());
}

double empirical_risk_lcl(std::span<const LCLExample> sample, const MulticlassWeights& W) {
  if (sample.empty()) throw std::invalid_argument("empirical_risk_lcl: empty sample");
  long errors = 0;
  for (const auto& ex : sample) errors += lcl_loss(W, ex);
  return static_cast<double>(errors) / static_cast<double>(sample.size());
}

}  // namespace ermr
