#include <algorithm>
#include <set>

#include "ermr/cli.hpp"
#include "ermr/io.hpp"

namespace ermr::cli {

using nlohmann::ordered_json;

namespace {

// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
void only_keys(const ordered_json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) throw std::invalid_argument(std::string(where) + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read_into(const ordered_json& obj, const char* key, T& target) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) target = it->get<T>();
}

}  // namespace

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ParseError(1, e.what());
  }
  ExperimentSpec spec;
  try {
    only_keys(j, "experiment", {"kind", "gen", "solver", "bound", "outputs", "verify"});
    spec.kind = parse_problem_kind(j.at("kind").get<std::string>());
    if (auto it = j.find("gen"); it != j.end()) {
      const auto& g = *it;
      only_keys(g, "gen", {"seed", "n", "d", "k", "set_size", "theta", "r_norm", "margin", "mil_threshold",
                           "max_rejections"});
      read_into(g, "seed", spec.gen.seed);
      read_into(g, "n", spec.gen.n);
      read_into(g, "d", spec.gen.d);
      read_into(g, "k", spec.gen.k);
      read_into(g, "set_size", spec.gen.set_size);
      read_into(g, "theta", spec.gen.theta);
      read_into(g, "r_norm", spec.gen.r_norm);
      read_into(g, "mil_threshold", spec.gen.mil_threshold);
      read_into(g, "max_rejections", spec.gen.max_rejections);
      if (auto m = g.find("margin"); m != g.end() && !m->is_null()) spec.gen.margin = m->get<double>();
    }
    if (auto it = j.find("solver"); it != j.end()) {
      const auto& s = *it;
      only_keys(s, "solver", {"c_reg", "tol", "max_iters", "dc_epsilon", "max_outer_iters", "restarts", "seed",
                              "lambda_cap"});
      read_into(s, "c_reg", spec.solver.c_reg);
      read_into(s, "tol", spec.solver.tol);
      read_into(s, "max_iters", spec.solver.max_iters);
      read_into(s, "dc_epsilon", spec.solver.dc_epsilon);
      read_into(s, "max_outer_iters", spec.solver.max_outer_iters);
      read_into(s, "restarts", spec.solver.restarts);
      read_into(s, "seed", spec.solver.seed);
      read_into(s, "lambda_cap", spec.solver.lambda_cap);
    }
    if (auto it = j.find("bound"); it != j.end()) {
      const auto& b = *it;
      only_keys(b, "bound", {"lipschitz", "eta", "delta", "lambda_cap"});
      read_into(b, "lipschitz", spec.lipschitz);
      read_into(b, "eta", spec.eta);
      read_into(b, "delta", spec.delta);
      if (auto m = b.find("lambda_cap"); m != b.end() && !m->is_null()) spec.lambda_cap = m->get<double>();
    }
    if (auto it = j.find("outputs"); it != j.end()) {
      only_keys(*it, "outputs", {"dir"});
      read_into(*it, "dir", spec.dir);
    }
    read_into(j, "verify", spec.verify);
  } catch (const ordered_json::exception& e) {
    throw ParseError(1, e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(1, e.what());
  }
  return spec;
}

void ExperimentSpec::validate() const {
  gen.validate();
  solver.validate();
  if (dir.empty()) throw std::invalid_argument("experiment: outputs.dir must not be empty");
  if (kind != ProblemKind::kLCL && gen.theta != 1.0) {
    throw std::invalid_argument("experiment: gen.theta applies to lcl only");
  }
  for (const auto& name : verify) {
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw std::invalid_argument("experiment: unknown check \"" + name + "\"");
    }
  }
}

int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& log) {
  spec.validate();
  const auto dir = output_path(spec.dir);
  std::filesystem::create_directories(dir);
  const auto at = [&](const char* name) { return (dir / name).string(); };

  GenOptions gen{spec.kind, spec.gen, at("data.jsonl"), spec.kind == ProblemKind::kLCL ? at("true_labels.jsonl") : ""};
  if (int rc = cmd_gen(gen, log); rc != kOk) return rc;

  if (spec.kind != ProblemKind::kMIL) {
    if (int rc = cmd_reduce({spec.kind, at("data.jsonl"), at("reduced.jsonl")}, log); rc != kOk) return rc;
  }

  TrainOptions train;
  train.kind = spec.kind;
  train.in = at("data.jsonl");
  train.model_out = at("model.json");
  train.solver = spec.solver;
  if (int rc = cmd_train(train, log); rc != kOk) return rc;

  EvalOptions eval{spec.kind, at("data.jsonl"), at("model.json"),
                   spec.kind == ProblemKind::kLCL ? at("true_labels.jsonl") : "", at("metrics.csv")};
  if (int rc = cmd_eval(eval, out, log); rc != kOk) return rc;

  BoundOptions bound;
  bound.kind = spec.kind;
  bound.data = at("data.jsonl");
  bound.model = at("model.json");
  bound.lipschitz = spec.lipschitz;
  bound.lambda_cap = spec.lambda_cap;
  bound.eta = spec.eta;
  bound.delta = spec.delta;
  if (spec.kind == ProblemKind::kLCL) bound.theta = spec.gen.theta;
  bound.report_out = at("bound.csv");
  if (int rc = cmd_bound(bound, out, log); rc != kOk) return rc;

  if (!spec.verify.empty()) {
    VerifyOptions verify{spec.verify, spec.gen.seed, spec.gen.seed, at("verify.json")};
    if (int rc = cmd_verify(verify, out, log); rc != kOk) return rc;
  }
  return kOk;
}

}  // namespace ermr::cli
