#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ermr/cli.hpp"
#include "ermr/io.hpp"
#include "ermr/oracle.hpp"

namespace ermr::cli {

using nlohmann::ordered_json;

namespace {

// Shortest round-trip text, independent of the global locale.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

class MetricTable {
 public:
  void add(const std::string& metric, const std::string& space, const std::string& value,
           const std::string& tolerance = "", const std::string& pass = "") {
    rows_ << metric << ',' << space << ',' << value << ',' << tolerance << ',' << pass << '\n';
  }
  void add_check(const std::string& metric, const std::string& space, double value, double tolerance,
                 bool pass) {
    add(metric, space, num(value), num(tolerance), pass ? "true" : "false");
  }
  std::string str() const { return "metric,space,value,tolerance,pass\n" + rows_.str(); }

 private:
  std::ostringstream rows_;
};

void emit(const std::string& text, const std::string& path, std::ostream& out, std::ostream& log,
          const char* what) {
  if (path.empty()) {
    out << text;
    return;
  }
  const auto p = output_path(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + p.string());
  log << "wrote " << what << " to " << p.string() << '\n';
}

std::vector<MILExample> training_sample(const Dataset& data, ProblemKind kind, ReducedSample& reduced) {
  if (kind == ProblemKind::kMIL) return std::get<0>(data);
  reduced = reduce_sample(data, kind);
  return reduced.examples;
}

int classes_of(const Dataset& data) {
  return std::visit(
      [](const auto& xs) -> int {
        using T = typename std::decay_t<decltype(xs)>::value_type;
        if constexpr (std::is_same_v<T, MCLExample> || std::is_same_v<T, LCLExample>) {
          return xs.empty() ? 0 : xs.front().classes();
        } else {
          return 0;
        }
      },
      data);
}

ordered_json trace_json(const SolverResult& r) {
  ordered_json j;
  j["solver"] = to_string(r.solver);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["objective"] = r.objective;
  j["duality_gap"] = r.duality_gap;
  j["objective_trace"] = r.objective_trace;
  return j;
}

ordered_json summary_json(const ordered_json& trace) {
  ordered_json j = trace;
  j.erase("objective_trace");
  return j;
}

double mean_hinge(std::span<const MILExample> sample, std::span<const double> w, std::size_t n) {
  if (n == 0) return 0.0;
  double total = 0.0;
  for (const auto& ex : sample) total += hinge(ex.label(), bag_score(w, ex.bag()));
  return total / static_cast<double>(n);
}

std::size_t reduced_errors(std::span<const MILExample> sample, std::span<const double> w) {
  std::size_t errors = 0;
  for (const auto& ex : sample) errors += static_cast<std::size_t>(zero_one_binary(ex.label(), bag_score(w, ex.bag())));
  return errors;
}

std::size_t original_errors(const Dataset& data, const Model& model) {
  return std::visit(
      [&](const auto& xs) -> std::size_t {
        using T = typename std::decay_t<decltype(xs)>::value_type;
        std::size_t errors = 0;
        if constexpr (std::is_same_v<T, MILExample>) {
          const auto& w = std::get<LinearWeights>(model);
          for (const auto& ex : xs) errors += static_cast<std::size_t>(zero_one_binary(ex.label(), bag_score(w, ex.bag())));
        } else if constexpr (std::is_same_v<T, TRLExample>) {
          const auto& w = std::get<LinearWeights>(model);
          for (const auto& ex : xs) errors += static_cast<std::size_t>(trl_loss(w, ex));
        } else if constexpr (std::is_same_v<T, MCLExample>) {
          const auto& W = std::get<MulticlassWeights>(model);
          for (const auto& ex : xs) errors += static_cast<std::size_t>(mcl_loss(W, ex));
        } else {
          const auto& W = std::get<MulticlassWeights>(model);
          for (const auto& ex : xs) errors += static_cast<std::size_t>(lcl_loss(W, ex));
        }
        return errors;
      },
      data);
}

void require_model_shape(const Dataset& data, ProblemKind kind, const Model& model) {
  const bool linear = std::holds_alternative<LinearWeights>(model);
  const bool want_linear = kind == ProblemKind::kMIL || kind == ProblemKind::kTRL;
  if (linear != want_linear) {
    throw std::invalid_argument(std::string("a ") + to_string(kind) + " dataset needs a " +
                                (want_linear ? "linear" : "multiclass") + " model");
  }
  if (size_of(data) == 0) return;
  const std::size_t d = std::visit(
      [](const auto& xs) -> std::size_t {
        using T = typename std::decay_t<decltype(xs)>::value_type;
        if constexpr (std::is_same_v<T, MILExample>) {
          return xs.front().bag().dim();
        } else if constexpr (std::is_same_v<T, TRLExample>) {
          return xs.front().dim();
        } else {
          return xs.front().x().dim();
        }
      },
      data);
  const std::size_t model_dim = std::visit([](const auto& m) { return m.dim(); }, model);
  if (d != model_dim) throw DimensionError("model dimension does not match the dataset");
  if (!linear && std::get<MulticlassWeights>(model).classes() != classes_of(data)) {
    throw std::invalid_argument("model k does not match the dataset");
  }
}

std::vector<double> reduced_weights(const Model& model) {
  if (const auto* w = std::get_if<LinearWeights>(&model)) {
    auto v = w->values();
    return {v.begin(), v.end()};
  }
  auto v = std::get<MulticlassWeights>(model).flat();
  return {v.begin(), v.end()};
}

double model_norm(const Model& model) { return norm(reduced_weights(model)); }

}  // namespace

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << '\n';
    return kParseFailed;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_gen(const GenOptions& opt, std::ostream& log) {
  if (opt.out.empty()) throw std::invalid_argument("gen: --out is required");
  if (!opt.sidecar.empty() && opt.kind != ProblemKind::kLCL) {
    throw std::invalid_argument("gen: --sidecar applies to lcl only");
  }
  Dataset data;
  std::vector<int> true_labels;
  switch (opt.kind) {
    case ProblemKind::kMIL: data = gen_mil(opt.gen).examples; break;
    case ProblemKind::kTRL: data = gen_trl(opt.gen).examples; break;
    case ProblemKind::kMCL: data = gen_mcl(opt.gen).examples; break;
    case ProblemKind::kLCL: {
      auto lcl = gen_lcl(opt.gen);
      true_labels = std::move(lcl.true_labels);
      data = std::move(lcl.examples);
      break;
    }
  }
  const auto path = output_path(opt.out);
  write_dataset(path, data);
  log << "wrote " << size_of(data) << " " << to_string(opt.kind) << " examples to " << path.string() << '\n';
  if (opt.kind == ProblemKind::kLCL) {
    const auto& xs = std::get<3>(data);
    std::size_t ordinary = 0;
    for (const auto& ex : xs) ordinary += ex.is_true() ? 1 : 0;
    log << "ordinary-label fraction " << num(static_cast<double>(ordinary) / static_cast<double>(xs.size())) << '\n';
    if (!opt.sidecar.empty()) {
      const auto side = output_path(opt.sidecar);
      write_true_labels(side, true_labels);
      log << "wrote true labels to " << side.string() << '\n';
    }
  }
  return kOk;
}

int cmd_reduce(const ReduceOptions& opt, std::ostream& log) {
  if (opt.kind == ProblemKind::kMIL) throw std::invalid_argument("reduce: input is already MIL");
  if (opt.out.empty()) throw std::invalid_argument("reduce: --out is required");
  const auto data = read_dataset(std::filesystem::path(opt.in), opt.kind);
  const auto reduced = reduce_sample(data, opt.kind);
  const auto path = output_path(opt.out);
  write_dataset(path, Dataset(reduced.examples));
  log << "skipped_count=" << reduced.skipped_count << '\n';
  log << "wrote " << reduced.examples.size() << " bags to " << path.string() << '\n';
  return kOk;
}

int cmd_train(const TrainOptions& opt, std::ostream& log) {
  if (opt.model_out.empty()) throw std::invalid_argument("train: --model is required");
  opt.solver.validate();
  const auto data = read_dataset(std::filesystem::path(opt.in), opt.kind);
  const auto model_path = output_path(opt.model_out);
  const auto trace_path = output_path(opt.trace_out.empty() ? opt.model_out + ".trace.json" : opt.trace_out);

  ordered_json trace;
  Model model = LinearWeights::zeros(1);
  bool converged = false;
  if (opt.method == TrainMethod::kDirect) {
    if (opt.kind != ProblemKind::kMCL) throw std::invalid_argument("train: --method direct needs an mcl dataset");
    const auto& xs = std::get<2>(data);
    if (xs.empty()) throw std::invalid_argument("train: empty dataset");
    const auto r = train_multiclass_svm_direct(xs, opt.solver);
    trace["solver"] = "multiclass-direct";
    trace["converged"] = r.converged;
    trace["iterations"] = r.iterations;
    trace["objective"] = r.objective;
    trace["duality_gap"] = r.duality_gap;
    model = r.weights;
    converged = r.converged;
  } else {
    ReducedSample reduced;
    const auto sample = training_sample(data, opt.kind, reduced);
    if (sample.empty()) throw std::invalid_argument("train: no training bags (empty or all-singleton input)");
    const auto r = train_misvm(sample, opt.solver);
    trace = trace_json(r);
    converged = r.converged;
    if (opt.kind == ProblemKind::kMCL || opt.kind == ProblemKind::kLCL) {
      model = mcl_restore(r.weights, reduced.classes);
    } else {
      model = r.weights;
    }
  }
  write_model(model_path, model, summary_json(trace));
  emit(trace.dump(2) + "\n", trace_path.string(), log, log, "trace");
  log << "solver=" << trace["solver"].get<std::string>() << " objective=" << num(trace["objective"].get<double>())
      << " iterations=" << trace["iterations"].get<int>() << " converged=" << (converged ? "true" : "false") << '\n';
  log << "wrote model to " << model_path.string() << '\n';
  if (!converged) {
    log << "solver did not converge; trace at " << trace_path.string() << '\n';
    return kNotConverged;
  }
  return kOk;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& log) {
  const auto data = read_dataset(std::filesystem::path(opt.data), opt.kind);
  const auto model = read_model(std::filesystem::path(opt.model));
  require_model_shape(data, opt.kind, model);
  const std::size_t n = size_of(data);
  const auto w = reduced_weights(model);
  const auto rate = [n](std::size_t errors) {
    return n == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(n);
  };

  MetricTable table;
  bool ok = true;
  table.add("n", "original", num(n));
  if (opt.kind == ProblemKind::kMIL) {
    const auto& xs = std::get<0>(data);
    const std::size_t errors = reduced_errors(xs, w);
    table.add("zero_one_errors", "reduced", num(errors));
    table.add("empirical_risk", "reduced", num(rate(errors)));
    table.add("hinge_risk", "reduced", num(mean_hinge(xs, w, n)));
  } else {
    const auto reduced = reduce_sample(data, opt.kind);
    const std::size_t orig = original_errors(data, model);
    const std::size_t red = reduced_errors(reduced.examples, w);
    // Dropped singleton sets have loss 0 on both sides, so counts compare directly.
    ok = orig == red;
    table.add("zero_one_errors", "original", num(orig));
    table.add_check("zero_one_errors", "reduced", static_cast<double>(red), 0.0, ok);
    table.add("empirical_risk", "original", num(rate(orig)));
    table.add_check("empirical_risk", "reduced", rate(red), 0.0, rate(orig) == rate(red));
    table.add("skipped_count", "reduced", num(reduced.skipped_count));
    table.add("hinge_risk", "reduced", num(mean_hinge(reduced.examples, w, n)));
    if (opt.kind == ProblemKind::kLCL && !opt.true_labels.empty()) {
      const auto labels = read_true_labels(std::filesystem::path(opt.true_labels));
      const auto& xs = std::get<3>(data);
      if (labels.size() != xs.size()) throw std::invalid_argument("eval: sidecar length differs from the dataset");
      const auto& W = std::get<MulticlassWeights>(model);
      std::size_t errors = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        errors += static_cast<std::size_t>(mcl_loss(W, MCLExample(xs[i].x(), labels[i], xs[i].classes())));
      }
      table.add("multiclass_risk", "original", num(rate(errors)));
    }
  }
  emit(table.str(), opt.report_out, out, log, "metrics");
  if (!ok) {
    log << "reduced and original 0/1 risks differ\n";
    return kVerificationFailed;
  }
  return kOk;
}

int cmd_bound(const BoundOptions& opt, std::ostream& out, std::ostream& log) {
  const auto data = read_dataset(std::filesystem::path(opt.data), opt.kind);
  ReducedSample reduced;
  const auto sample = training_sample(data, opt.kind, reduced);
  if (sample.empty()) throw std::invalid_argument("bound: no bags in the (reduced) sample");
  const auto stats = bag_statistics(sample);

  std::optional<Model> model;
  if (!opt.model.empty()) {
    model = read_model(std::filesystem::path(opt.model));
    require_model_shape(data, opt.kind, *model);
  }
  BoundParams p;
  p.lipschitz = opt.lipschitz;
  p.r_norm = opt.r_norm.value_or(stats.max_norm);
  if (opt.lambda_cap) {
    p.lambda_cap = *opt.lambda_cap;
  } else if (model) {
    p.lambda_cap = model_norm(*model);
  } else {
    throw std::invalid_argument("bound: --lambda-cap or --model is required");
  }
  p.n = stats.n;
  p.total_bag_instances = stats.total_instances;
  p.union_instances = stats.union_instances;
  p.eta = opt.eta;
  p.delta = opt.delta;
  p.validate();

  double scale = 1.0;
  if (opt.kind == ProblemKind::kLCL) {
    if (!opt.theta) throw std::invalid_argument("bound: --theta is required for lcl");
    scale = lcl_risk_scale(*opt.theta, reduced.classes);
  } else if (opt.theta) {
    throw std::invalid_argument("bound: --theta applies to lcl only");
  }
  double emp = 0.0;
  std::string emp_source = "zero";
  if (opt.empirical_risk) {
    emp = *opt.empirical_risk;
    emp_source = "given";
  } else if (model) {
    emp = mean_hinge(sample, reduced_weights(*model), sample.size());
    emp_source = "model hinge";
  }

  const auto c = mil_complexity_bound(p);
  const double dev_literal = deviation_term(p.n, p.delta, DeviationMode::kLiteral);
  const double dev_log = deviation_term(p.n, p.delta, DeviationMode::kLogForm);

  MetricTable table;
  table.add("n", "reduced", num(p.n));
  table.add("total_bag_instances", "reduced", num(p.total_bag_instances));
  table.add("union_instances", "reduced", num(p.union_instances));
  table.add("lipschitz", "reduced", num(p.lipschitz));
  table.add("r_norm", "reduced", num(p.r_norm));
  table.add("lambda_cap", "reduced", num(p.lambda_cap));
  table.add("eta", "reduced", num(p.eta));
  table.add("delta", "reduced", num(p.delta));
  table.add("expr1", "reduced", num(c.expr1));
  table.add("expr1_degenerate", "reduced", c.expr1_degenerate ? "true" : "false");
  table.add("expr2", "reduced", num(c.expr2));
  table.add("expr2_degenerate", "reduced", c.expr2_degenerate ? "true" : "false");
  table.add("complexity_min", "reduced", num(c.value));
  table.add("deviation_literal", "reduced", num(dev_literal));
  table.add("deviation_log", "reduced", num(dev_log));
  table.add("empirical_risk", "reduced", num(emp));
  table.add("scale", "original", num(scale));
  table.add("bound_literal", "original", num(assemble_bound(emp, c.value, dev_literal, scale)));
  table.add("bound_log", "original", num(assemble_bound(emp, c.value, dev_log, scale)));
  emit(table.str(), opt.report_out, out, log, "bound report");
  log << "empirical risk source: " << emp_source << '\n';
  return kOk;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& log) {
  if (opt.seed_end < opt.seed_begin) throw std::invalid_argument("verify: empty seed range");
  const auto& checks = opt.checks.empty() ? check_names() : opt.checks;
  for (const auto& name : checks) {
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw std::invalid_argument("verify: unknown check \"" + name + "\"");
    }
  }
  ordered_json report;
  report["seed_begin"] = opt.seed_begin;
  report["seed_end"] = opt.seed_end;
  report["results"] = ordered_json::array();
  bool all = true;
  for (const auto& name : checks) {
    for (std::uint64_t seed = opt.seed_begin; seed <= opt.seed_end; ++seed) {
      for (const auto& r : run_check(name, seed)) {
        ordered_json entry;
        entry["check"] = name;
        entry["seed"] = seed;
        entry["report"] = r.to_json();
        report["results"].push_back(std::move(entry));
        all = all && r.passed;
        log << (r.passed ? "PASS " : "FAIL ") << name << " seed=" << seed << " " << r.name;
        if (!r.passed) log << " (" << r.note << ")";
        log << '\n';
      }
    }
  }
  report["passed"] = all;
  emit(report.dump(2) + "\n", opt.report_out, out, log, "verification report");
  return all ? kOk : kVerificationFailed;
}

}  // namespace ermr::cli
