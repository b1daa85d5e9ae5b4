#include "doctest.h"
#include "ermr/cli.hpp"
#include "ermr/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ermr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ermr_test_io_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string dump(const Dataset& d) {
  std::ostringstream out;
  write_dataset(out, d);
  return out.str();
}

GenConfig gen(std::uint64_t seed, std::size_t n) {
  GenConfig g;
  g.seed = seed;
  g.n = n;
  g.d = 3;
  g.k = 4;
  g.set_size = 4;
  return g;
}

}  // namespace

TEST_CASE("dataset round trips are bitwise") {
  auto g = gen(1, 30);
  g.theta = 0.4;
  const std::vector<std::pair<ProblemKind, Dataset>> sets{
      {ProblemKind::kMIL, Dataset(gen_mil(g).examples)},
      {ProblemKind::kTRL, Dataset(gen_trl(g).examples)},
      {ProblemKind::kMCL, Dataset(gen_mcl(g).examples)},
      {ProblemKind::kLCL, Dataset(gen_lcl(g).examples)},
  };
  for (const auto& [kind, data] : sets) {
    const std::string text = dump(data);
    std::istringstream in(text);
    const auto back = read_dataset(in, kind);
    CHECK(back == data);
    CHECK(dump(back) == text);
  }
  std::istringstream empty("");
  CHECK(size_of(read_dataset(empty, ProblemKind::kMCL)) == 0);
  std::istringstream blanks("\n{\"features\":[1,2],\"label\":1,\"k\":2}\n\n");
  CHECK(size_of(read_dataset(blanks, ProblemKind::kMCL)) == 1);
}

TEST_CASE("parse errors carry line numbers") {
  const auto check_line = [](const std::string& text, ProblemKind kind, std::size_t line) {
    std::istringstream in(text);
    try {
      read_dataset(in, kind);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  check_line("{\"features\":[1],\"label\":1,\"k\":2}\n{oops", ProblemKind::kMCL, 2);
  check_line("{\"features\":[1],\"label\":3,\"k\":2}", ProblemKind::kMCL, 1);
  check_line("{\"bag\":[[1]],\"label\":0}", ProblemKind::kMIL, 1);
  check_line("\n\n{\"items\":[[1]],\"target_index\":4}", ProblemKind::kTRL, 3);
  check_line("{\"features\":[1],\"label\":1,\"k\":2}", ProblemKind::kLCL, 1);

  std::istringstream mixed("{\"features\":[1],\"label\":1,\"k\":2}\n{\"features\":[1,2],\"label\":1,\"k\":2}");
  CHECK_THROWS_AS(read_dataset(mixed, ProblemKind::kMCL), ParseError);
  CHECK_THROWS_AS(read_dataset(fs::path("/nonexistent/ermr.jsonl"), ProblemKind::kMCL), IoError);
}

TEST_CASE("model files") {
  const Model lin = LinearWeights{0.1, -2.5, 1e-300};
  const Model mc = MulticlassWeights({{1, 2}, {3, 0.30000000000000004}});
  for (const auto& m : {lin, mc}) {
    const auto text = model_to_string(m);
    CHECK(model_from_string(text) == m);
    CHECK(model_to_string(model_from_string(text)) == text);
  }
  nlohmann::ordered_json training{{"converged", true}};
  CHECK(model_from_string(model_to_string(mc, training)) == mc);
  CHECK_THROWS_AS(model_from_string("{\"kind\":\"linear\"}"), ParseError);
  CHECK_THROWS_AS(model_from_string("{\"kind\":\"linear\",\"dim\":2,\"classes\":null,\"weights\":[1],\"lambda_cap\":null}"),
                  ParseError);
}

TEST_CASE("output_path honours ERMR_OUTPUT_DIR") {
  ::setenv("ERMR_OUTPUT_DIR", "/tmp/ermr_out", 1);
  CHECK(output_path("a/b.json") == fs::path("/tmp/ermr_out/a/b.json"));
  CHECK(output_path("/abs/c.json") == fs::path("/abs/c.json"));
  ::unsetenv("ERMR_OUTPUT_DIR");
  CHECK(output_path("a/b.json") == fs::path("a/b.json"));
}

TEST_CASE("reduce command") {
  const auto dir = scratch("reduce");
  std::ostringstream log;

  spit(dir / "empty.jsonl", "");
  CHECK(cli::cmd_reduce({ProblemKind::kMCL, (dir / "empty.jsonl").string(), (dir / "empty.out").string()}, log) ==
        cli::kOk);
  CHECK(slurp(dir / "empty.out").empty());

  auto g = gen(3, 10);
  g.k = 3;
  cli::GenOptions go;
  go.kind = ProblemKind::kMCL;
  go.gen = g;
  go.out = (dir / "mcl.jsonl").string();
  REQUIRE(cli::cmd_gen(go, log) == cli::kOk);
  REQUIRE(cli::cmd_reduce({ProblemKind::kMCL, go.out, (dir / "red.jsonl").string()}, log) == cli::kOk);
  const auto red = std::get<0>(read_dataset(dir / "red.jsonl", ProblemKind::kMIL));
  CHECK(red.size() == 10);
  for (const auto& ex : red) {
    CHECK(ex.bag().size() == 2);
    CHECK(ex.label() == -1);
    CHECK(ex.bag().dim() == 9);
  }

  spit(dir / "trl.jsonl", "{\"items\":[[1,0]],\"target_index\":0}\n{\"items\":[[1,0],[0,1]],\"target_index\":1}\n");
  std::ostringstream tlog;
  REQUIRE(cli::cmd_reduce({ProblemKind::kTRL, (dir / "trl.jsonl").string(), (dir / "trl.out").string()}, tlog) ==
          cli::kOk);
  CHECK(tlog.str().find("skipped_count=1") != std::string::npos);
  CHECK(size_of(read_dataset(dir / "trl.out", ProblemKind::kMIL)) == 1);

  spit(dir / "bad.jsonl", "{\"features\":[1],\"label\":1,\"k\":2}\nnot json\n");
  std::ostringstream blog;
  const int rc = cli::guarded(blog, [&] {
    return cli::cmd_reduce({ProblemKind::kMCL, (dir / "bad.jsonl").string(), (dir / "bad.out").string()}, blog);
  });
  CHECK(rc == cli::kParseFailed);
  CHECK(blog.str().find("line 2") != std::string::npos);
  CHECK(cli::guarded(blog, [&] {
          return cli::cmd_reduce({ProblemKind::kMCL, (dir / "missing.jsonl").string(), (dir / "x").string()}, blog);
        }) == cli::kFailure);
}

TEST_CASE("gen is byte-for-byte deterministic") {
  const auto dir = scratch("gen");
  std::ostringstream log;
  for (auto kind : {ProblemKind::kMIL, ProblemKind::kTRL, ProblemKind::kMCL, ProblemKind::kLCL}) {
    cli::GenOptions go;
    go.kind = kind;
    go.gen = gen(5, 40);
    if (kind == ProblemKind::kLCL) go.gen.theta = 0.5;
    go.out = (dir / "a.jsonl").string();
    REQUIRE(cli::cmd_gen(go, log) == cli::kOk);
    go.out = (dir / "b.jsonl").string();
    REQUIRE(cli::cmd_gen(go, log) == cli::kOk);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  }
}

TEST_CASE("train and eval") {
  const auto dir = scratch("train");
  std::ostringstream log;
  cli::GenOptions go;
  go.kind = ProblemKind::kMCL;
  go.gen = gen(7, 40);
  go.out = (dir / "mcl.jsonl").string();
  REQUIRE(cli::cmd_gen(go, log) == cli::kOk);
  REQUIRE(cli::cmd_reduce({ProblemKind::kMCL, go.out, (dir / "red.jsonl").string()}, log) == cli::kOk);

  cli::TrainOptions to;
  to.kind = ProblemKind::kMIL;
  to.in = (dir / "red.jsonl").string();
  to.model_out = (dir / "mil_model.json").string();
  REQUIRE(cli::cmd_train(to, log) == cli::kOk);
  const auto stored = nlohmann::json::parse(slurp(dir / "mil_model.json"));
  CHECK(stored["training"]["converged"] == true);
  CHECK(stored["training"]["solver"] == "oneclass");
  CHECK(fs::exists(dir / "mil_model.json.trace.json"));
  CHECK(std::holds_alternative<LinearWeights>(read_model(dir / "mil_model.json")));

  to.kind = ProblemKind::kMCL;
  to.in = go.out;
  to.model_out = (dir / "model.json").string();
  REQUIRE(cli::cmd_train(to, log) == cli::kOk);
  const auto model = read_model(dir / "model.json");
  REQUIRE(std::holds_alternative<MulticlassWeights>(model));
  // Training on the reduced file and on the original file give the same weights.
  CHECK(flatten(std::get<MulticlassWeights>(model)) == std::get<LinearWeights>(read_model(dir / "mil_model.json")));

  std::ostringstream metrics;
  CHECK(cli::cmd_eval({ProblemKind::kMCL, go.out, to.model_out, "", ""}, metrics, log) == cli::kOk);
  CHECK(metrics.str().rfind("metric,space,value,tolerance,pass\n", 0) == 0);
  CHECK(metrics.str().find("zero_one_errors,reduced") != std::string::npos);

  cli::EvalOptions wrong{ProblemKind::kMCL, go.out, (dir / "mil_model.json").string(), "", ""};
  CHECK(cli::guarded(log, [&] { return cli::cmd_eval(wrong, metrics, log); }) == cli::kFailure);

  cli::TrainOptions capped = to;
  capped.solver.max_iters = 1;
  capped.model_out = (dir / "short.json").string();
  CHECK(cli::cmd_train(capped, log) == cli::kNotConverged);

  cli::TrainOptions direct = to;
  direct.method = cli::TrainMethod::kDirect;
  direct.model_out = (dir / "direct.json").string();
  CHECK(cli::cmd_train(direct, log) == cli::kOk);
}

TEST_CASE("bound command") {
  const auto dir = scratch("bound");
  std::ostringstream log, out;
  cli::GenOptions go;
  go.kind = ProblemKind::kMCL;
  go.gen = gen(9, 50);
  go.out = (dir / "mcl.jsonl").string();
  REQUIRE(cli::cmd_gen(go, log) == cli::kOk);
  cli::BoundOptions bo;
  bo.kind = ProblemKind::kMCL;
  bo.data = go.out;
  bo.lambda_cap = 2.0;
  bo.empirical_risk = 0.1;
  CHECK(cli::cmd_bound(bo, out, log) == cli::kOk);
  for (const char* row : {"complexity_min", "deviation_literal", "deviation_log", "bound_literal", "bound_log"}) {
    CHECK(out.str().find(row) != std::string::npos);
  }
}

TEST_CASE("verify command") {
  std::ostringstream out, log;
  cli::VerifyOptions vo;
  vo.seed_begin = 1;
  vo.seed_end = 2;
  CHECK(cli::cmd_verify(vo, out, log) == cli::kOk);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["passed"] == true);
  CHECK(j["results"].size() >= 2 * cli::check_names().size());
  CHECK_THROWS(cli::run_check("no-such-check", 1));
}

TEST_CASE("experiment spec") {
  const auto spec = cli::ExperimentSpec::from_json(
      R"({"kind": "lcl", "gen": {"n": 30, "theta": 0.5}, "solver": {"c_reg": 2}, "bound": {"delta": 0.1},
          "outputs": {"dir": "x"}, "verify": ["loss-equality"]})");
  CHECK(spec.kind == ProblemKind::kLCL);
  CHECK(spec.gen.n == 30);
  CHECK(spec.gen.theta == 0.5);
  CHECK(spec.solver.c_reg == 2.0);
  CHECK(spec.delta == 0.1);
  CHECK(spec.dir == "x");
  CHECK_NOTHROW(spec.validate());

  CHECK_THROWS_AS(cli::ExperimentSpec::from_json(R"({"kind": "mcl", "gen": {"nn": 3}})"), ParseError);
  CHECK_THROWS_AS(cli::ExperimentSpec::from_json(R"({"kind": "mcl", "extra": 1})"), ParseError);
  CHECK_THROWS_AS(cli::ExperimentSpec::from_json("{"), ParseError);
  CHECK_THROWS(cli::ExperimentSpec::from_json(R"({"kind": "mcl", "gen": {"theta": 0.5}})").validate());
  CHECK_THROWS(cli::ExperimentSpec::from_json(R"({"kind": "mcl", "verify": ["bogus"]})").validate());
}

TEST_CASE("run writes every artefact") {
  const auto dir = scratch("run");
  auto spec = cli::ExperimentSpec::from_json(R"({"kind": "lcl", "gen": {"n": 40, "d": 2, "k": 3, "theta": 0.5},
                                                 "verify": ["loss-equality"]})");
  spec.dir = dir.string();
  std::ostringstream out, log;
  CHECK(cli::cmd_run(spec, out, log) == cli::kOk);
  for (const char* f : {"data.jsonl", "true_labels.jsonl", "reduced.jsonl", "model.json", "metrics.csv", "bound.csv",
                        "verify.json"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  CHECK(slurp(dir / "metrics.csv").find("multiclass_risk") != std::string::npos);
}
