#include "ermr/reductions.hpp"

#include <sstream>

namespace ermr {

namespace {

nlohmann::ordered_json coords_json(std::span<const double> v) {
  return nlohmann::ordered_json(std::vector<double>(v.begin(), v.end()));
}

VerificationReport loss_report(const char* name, int original, int reduced,
                               nlohmann::ordered_json example,
                               nlohmann::ordered_json weights) {
  auto report = make_equality_report(name, original, reduced, 0.0);
  if (!report.passed) {
    nlohmann::ordered_json w;
    w["example"] = std::move(example);
    w["weights"] = std::move(weights);
    w["original_loss"] = original;
    w["reduced_loss"] = reduced;
    report.witness = std::move(w);
  }
  return report;
}

template <typename Example, typename Reduce>
ReducedSample reduce_all(std::span<const Example> sample, ProblemKind kind, Reduce reduce) {
  ReducedSample out;
  out.source = kind;
  if (sample.empty()) return out;
  out.examples.reserve(sample.size());
  out.source_index.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::optional<MILExample> reduced = reduce(sample[i]);
    if (!reduced) {
      ++out.skipped_count;
      continue;
    }
    out.examples.push_back(std::move(*reduced));
    out.source_index.push_back(i);
  }
  return out;
}

template <typename Example>
void require_uniform_multiclass(std::span<const Example> sample, const char* what) {
  for (const auto& ex : sample) {
    if (ex.classes() != sample.front().classes() || ex.x().dim() != sample.front().x().dim()) {
      throw DimensionError(std::string(what) + ": mixed class counts or dimensions");
    }
  }
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kMIL: return "mil";
    case ProblemKind::kTRL: return "trl";
    case ProblemKind::kMCL: return "mcl";
    case ProblemKind::kLCL: return "lcl";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& text) {
  if (text == "mil" || text == "MIL") return ProblemKind::kMIL;
  if (text == "trl" || text == "TRL") return ProblemKind::kTRL;
  if (text == "mcl" || text == "MCL") return ProblemKind::kMCL;
  if (text == "lcl" || text == "LCL") return ProblemKind::kLCL;
  throw std::invalid_argument("unknown problem kind: " + text);
}

ProblemKind kind_of(const Dataset& data) {
  return static_cast<ProblemKind>(data.index());
}

std::size_t size_of(const Dataset& data) {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::optional<MILExample> trl_reduce(const TRLExample& ex) {
  const auto& items = ex.items();
  if (items.size() == 1) return std::nullopt;
  const auto target = ex.target().coords();
  std::vector<Instance> diffs;
  diffs.reserve(items.size() - 1);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == ex.target_index()) continue;
    std::vector<double> d(target.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = items[i][j] - target[j];
    diffs.emplace_back(std::move(d));
  }
  return MILExample(Bag(std::move(diffs)), -1);
}

RankingHypothesis trl_restore(const LinearWeights& w) { return RankingHypothesis(w); }

Instance mcl_embed(const Instance& x, int label, int classes) {
  if (classes < 1 || label < 1 || label > classes) {
    throw std::out_of_range("mcl_embed: label outside 1..k");
  }
  const std::size_t d = x.dim();
  std::vector<double> z(d * static_cast<std::size_t>(classes), 0.0);
  const std::size_t offset = static_cast<std::size_t>(label - 1) * d;
  for (std::size_t j = 0; j < d; ++j) z[offset + j] = x[j];
  return Instance(std::move(z));
}

namespace {

// {z(x, y') - z(x, y) : y' != y}, built directly without materialising z.
Bag multiclass_bag(const Instance& x, int label, int classes) {
  if (classes < 2) throw std::invalid_argument("multiclass reduction: k must be >= 2");
  const std::size_t d = x.dim();
  const std::size_t total = d * static_cast<std::size_t>(classes);
  const std::size_t own = static_cast<std::size_t>(label - 1) * d;
  std::vector<Instance> diffs;
  diffs.reserve(static_cast<std::size_t>(classes - 1));
  for (int other = 1; other <= classes; ++other) {
    if (other == label) continue;
    std::vector<double> v(total, 0.0);
    const std::size_t off = static_cast<std::size_t>(other - 1) * d;
    for (std::size_t j = 0; j < d; ++j) {
      v[off + j] = x[j];
      v[own + j] = -x[j];
    }
    diffs.emplace_back(std::move(v));
  }
  return Bag(std::move(diffs));
}

}  // namespace

MILExample mcl_reduce(const MCLExample& ex) {
  return MILExample(multiclass_bag(ex.x(), ex.label(), ex.classes()), -1);
}

MulticlassWeights mcl_restore(const LinearWeights& omega, int classes) {
  if (classes < 2) throw std::invalid_argument("mcl_restore: k must be >= 2");
  const auto k = static_cast<std::size_t>(classes);
  if (omega.dim() % k != 0) {
    std::ostringstream msg;
    msg << "mcl_restore: dimension " << omega.dim() << " not divisible by k=" << classes;
    throw DimensionError(msg.str());
  }
  auto v = omega.values();
  return MulticlassWeights(classes, omega.dim() / k, std::vector<double>(v.begin(), v.end()),
                           omega.lambda_cap());
}

LinearWeights flatten(const MulticlassWeights& W) {
  auto v = W.flat();
  return LinearWeights(std::vector<double>(v.begin(), v.end()), W.lambda_cap());
}

int lcl_bag_label(bool is_true) { return is_true ? -1 : 1; }

MILExample lcl_reduce(const LCLExample& ex) {
  return MILExample(multiclass_bag(ex.x(), ex.label(), ex.classes()), lcl_bag_label(ex.is_true()));
}

ReducedSample reduce_sample(std::span<const TRLExample> sample) {
  for (const auto& ex : sample) {
    if (ex.dim() != sample.front().dim()) throw DimensionError("reduce_sample: mixed dimensions");
  }
  auto out = reduce_all(sample, ProblemKind::kTRL, trl_reduce);
  if (!sample.empty()) out.dim = sample.front().dim();
  return out;
}

ReducedSample reduce_sample(std::span<const MCLExample> sample) {
  require_uniform_multiclass(sample, "reduce_sample");
  auto out = reduce_all(sample, ProblemKind::kMCL,
                        [](const MCLExample& ex) { return std::optional(mcl_reduce(ex)); });
  if (!sample.empty()) {
    out.dim = sample.front().x().dim();
    out.classes = sample.front().classes();
  }
  return out;
}

ReducedSample reduce_sample(std::span<const LCLExample> sample) {
  require_uniform_multiclass(sample, "reduce_sample");
  auto out = reduce_all(sample, ProblemKind::kLCL,
                        [](const LCLExample& ex) { return std::optional(lcl_reduce(ex)); });
  if (!sample.empty()) {
    out.dim = sample.front().x().dim();
    out.classes = sample.front().classes();
  }
  return out;
}

ReducedSample reduce_sample(const Dataset& data, ProblemKind kind) {
  if (kind_of(data) != kind) {
    throw std::invalid_argument("reduce_sample: dataset holds " + to_string(kind_of(data)) +
                                " examples, expected " + to_string(kind));
  }
  switch (kind) {
    case ProblemKind::kTRL: return reduce_sample(std::span<const TRLExample>(std::get<1>(data)));
    case ProblemKind::kMCL: return reduce_sample(std::span<const MCLExample>(std::get<2>(data)));
    case ProblemKind::kLCL: return reduce_sample(std::span<const LCLExample>(std::get<3>(data)));
    case ProblemKind::kMIL: break;
  }
  throw std::invalid_argument("reduce_sample: MIL data is already reduced");
}

VerificationReport check_loss_equality(const TRLExample& ex, const LinearWeights& w) {
  const int original = trl_loss(w, ex);
  const auto reduced_ex = trl_reduce(ex);
  // A dropped singleton has no reduced counterpart; its loss is 0 by definition.
  const int reduced = reduced_ex ? zero_one_binary(reduced_ex->label(), bag_score(w, reduced_ex->bag())) : 0;
  nlohmann::ordered_json e;
  if (original != reduced) {
    e["items"] = nlohmann::ordered_json::array();
    for (const auto& x : ex.items()) e["items"].push_back(coords_json(x.coords()));
    e["target_index"] = ex.target_index();
  }
  return loss_report("trl_loss_equality", original, reduced, std::move(e), coords_json(w.values()));
}

VerificationReport check_loss_equality(const MCLExample& ex, const MulticlassWeights& W) {
  const int original = mcl_loss(W, ex);
  const auto reduced_ex = mcl_reduce(ex);
  const int reduced = zero_one_binary(reduced_ex.label(), bag_score(W.flat(), reduced_ex.bag()));
  nlohmann::ordered_json e;
  if (original != reduced) {
    e["features"] = coords_json(ex.x().coords());
    e["label"] = ex.label();
    e["k"] = ex.classes();
  }
  return loss_report("mcl_loss_equality", original, reduced, std::move(e), coords_json(W.flat()));
}

VerificationReport check_loss_equality(const LCLExample& ex, const MulticlassWeights& W) {
  const int original = lcl_loss(W, ex);
  const auto reduced_ex = lcl_reduce(ex);
  const int reduced = zero_one_binary(reduced_ex.label(), bag_score(W.flat(), reduced_ex.bag()));
  nlohmann::ordered_json e;
  if (original != reduced) {
    e["features"] = coords_json(ex.x().coords());
    e["label"] = ex.label();
    e["k"] = ex.classes();
    e["is_true"] = ex.is_true();
  }
  return loss_report("lcl_loss_equality", original, reduced, std::move(e), coords_json(W.flat()));
}

}  // namespace ermr
