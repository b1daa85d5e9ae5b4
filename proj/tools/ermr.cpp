// ermr: generate, reduce, train, evaluate, bound and verify.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ermr/cli.hpp"
#include "ermr/io.hpp"

using namespace ermr;
using namespace ermr::cli;

namespace {

ProblemKind kind_from(const std::string& s) { return parse_problem_kind(s); }

const std::vector<std::string> kKinds = {"mil", "trl", "mcl", "lcl"};

void add_kind(CLI::App* cmd, std::string& target, bool with_mil = true) {
  std::vector<std::string> kinds = kKinds;
  if (!with_mil) kinds.erase(kinds.begin());
  cmd->add_option("--kind", target, "problem kind")->required()->check(CLI::IsMember(kinds));
}

void add_solver(CLI::App* cmd, SolverConfig& s) {
  cmd->add_option("--c", s.c_reg, "hinge weight C")->capture_default_str();
  cmd->add_option("--tol", s.tol, "relative duality-gap tolerance")->capture_default_str();
  cmd->add_option("--max-iters", s.max_iters, "dual sweeps per convex solve")->capture_default_str();
  cmd->add_option("--dc-epsilon", s.dc_epsilon, "CCCP stopping threshold")->capture_default_str();
  cmd->add_option("--max-outer-iters", s.max_outer_iters, "CCCP iteration limit")->capture_default_str();
  cmd->add_option("--restarts", s.restarts, "extra seeded CCCP starts")->capture_default_str();
  cmd->add_option("--solver-seed", s.seed, "seed for CCCP restarts")->capture_default_str();
  cmd->add_option("--lambda-cap", s.lambda_cap, "norm cap on the weights (default: none)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ERM reductions to multiple-instance learning"};
  app.require_subcommand(1);

  std::string kind;

  GenOptions gen;
  std::optional<double> margin;
  auto* g = app.add_subcommand("gen", "write a seeded synthetic dataset");
  add_kind(g, kind);
  g->add_option("--n", gen.gen.n, "examples")->capture_default_str();
  g->add_option("--d", gen.gen.d, "feature dimension")->capture_default_str();
  g->add_option("--k", gen.gen.k, "classes (mcl, lcl)")->capture_default_str();
  g->add_option("--set-size", gen.gen.set_size, "items per set or bag (trl, mil)")->capture_default_str();
  g->add_option("--theta", gen.gen.theta, "ordinary-label probability (lcl)")->capture_default_str();
  g->add_option("--r-norm", gen.gen.r_norm, "feature ball radius")->capture_default_str();
  g->add_option("--margin", margin, "reject draws with planted margin below this");
  g->add_option("--mil-threshold", gen.gen.mil_threshold, "planted bag-score threshold (mil)")->capture_default_str();
  g->add_option("--seed", gen.gen.seed, "random seed")->capture_default_str();
  g->add_option("--out", gen.out, "output dataset")->required();
  g->add_option("--sidecar", gen.sidecar, "true-label sidecar (lcl)");

  ReduceOptions red;
  auto* r = app.add_subcommand("reduce", "map a TRL/MCL/LCL dataset to a MIL dataset");
  add_kind(r, kind, false);
  r->add_option("--in", red.in, "input dataset")->required();
  r->add_option("--out", red.out, "output MIL dataset")->required();

  TrainOptions train;
  std::string method = "auto";
  auto* t = app.add_subcommand("train", "fit an MI-SVM (reducing first when needed)");
  add_kind(t, kind);
  t->add_option("--in", train.in, "training dataset")->required();
  t->add_option("--model", train.model_out, "output model file")->required();
  t->add_option("--trace", train.trace_out, "objective trace (default: <model>.trace.json)");
  t->add_option("--method", method, "auto: via MIL; direct: multi-class SVM on mcl")
      ->check(CLI::IsMember({"auto", "direct"}))
      ->capture_default_str();
  add_solver(t, train.solver);

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "0/1 risks in the original and reduced spaces");
  add_kind(e, kind);
  e->add_option("--data", ev.data, "dataset")->required();
  e->add_option("--model", ev.model, "model file")->required();
  e->add_option("--true-labels", ev.true_labels, "true-label sidecar (lcl)");
  e->add_option("--report", ev.report_out, "CSV output (default: stdout)");

  BoundOptions bo;
  auto* b = app.add_subcommand("bound", "MIL complexity terms and assembled risk bounds");
  add_kind(b, kind);
  b->add_option("--data", bo.data, "dataset")->required();
  b->add_option("--model", bo.model, "model file (supplies Lambda and empirical hinge risk)");
  b->add_option("--lipschitz", bo.lipschitz, "loss Lipschitz constant")->capture_default_str();
  b->add_option("--r-norm", bo.r_norm, "instance norm bound (default: observed maximum)");
  b->add_option("--lambda-cap", bo.lambda_cap, "weight norm bound (default: model norm)");
  b->add_option("--eta", bo.eta, "eta parameter of the second expression")->capture_default_str();
  b->add_option("--delta", bo.delta, "confidence parameter")->capture_default_str();
  b->add_option("--theta", bo.theta, "ordinary-label probability (lcl)");
  b->add_option("--empirical-risk", bo.empirical_risk, "override the empirical risk");
  b->add_option("--report", bo.report_out, "CSV output (default: stdout)");

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "run named oracle checks over a seed range");
  v->add_option("--check", ver.checks, "check name, repeatable (default: all)")->check(CLI::IsMember(check_names()));
  v->add_option("--seed-begin", ver.seed_begin, "first seed")->capture_default_str();
  v->add_option("--seed-end", ver.seed_end, "last seed (inclusive)")->capture_default_str();
  v->add_option("--report", ver.report_out, "JSON output (default: stdout)");

  std::string spec_path;
  auto* x = app.add_subcommand("run", "gen, reduce, train, eval, bound and verify from one JSON file");
  x->add_option("--spec", spec_path, "experiment file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kFailure;
  }

  std::ostream& out = std::cout;
  std::ostream& log = std::cerr;
  return guarded(log, [&]() -> int {
    if (*g) {
      gen.kind = kind_from(kind);
      gen.gen.margin = margin;
      return cmd_gen(gen, out);
    }
    if (*r) {
      red.kind = kind_from(kind);
      return cmd_reduce(red, out);
    }
    if (*t) {
      train.kind = kind_from(kind);
      train.method = method == "direct" ? TrainMethod::kDirect : TrainMethod::kAuto;
      return cmd_train(train, out);
    }
    if (*e) {
      ev.kind = kind_from(kind);
      return cmd_eval(ev, out, log);
    }
    if (*b) {
      bo.kind = kind_from(kind);
      return cmd_bound(bo, out, log);
    }
    if (*v) return cmd_verify(ver, out, log);
    std::ifstream in(spec_path);
    std::stringstream text;
    text << in.rdbuf();
    return cmd_run(ExperimentSpec::from_json(text.str()), out, log);
  });
}
