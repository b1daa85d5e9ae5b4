#ifndef ERMR_CLI_HPP
#define ERMR_CLI_HPP

// Command implementations behind the `ermr` executable. Each command reads
// and writes files, logs to `log`, and returns a process exit code.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ermr/analysis.hpp"
#include "ermr/datagen.hpp"
#include "ermr/reductions.hpp"
#include "ermr/report.hpp"
#include "ermr/solvers.hpp"

namespace ermr::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // I/O and argument errors
  kVerificationFailed = 2,
  kParseFailed = 3,
  kNotConverged = 4,
};

struct GenOptions {
  ProblemKind kind = ProblemKind::kMCL;
  GenConfig gen;
  std::string out;
  std::string sidecar;  // LCL only: true labels, one {"true_label": y} per line
};

struct ReduceOptions {
  ProblemKind kind = ProblemKind::kMCL;
  std::string in;
  std::string out;
};

enum class TrainMethod { kAuto, kDirect };

struct TrainOptions {
  ProblemKind kind = ProblemKind::kMIL;
  std::string in;
  std::string model_out;
  std::string trace_out;  // defaults to model_out + ".trace.json"
  SolverConfig solver;
  TrainMethod method = TrainMethod::kAuto;  // kDirect: Crammer-Singer, MCL only
};

struct EvalOptions {
  ProblemKind kind = ProblemKind::kMCL;
  std::string data;
  std::string model;
  std::string true_labels;  // LCL sidecar, optional
  std::string report_out;   // CSV; stdout when empty
};

struct BoundOptions {
  ProblemKind kind = ProblemKind::kMCL;
  std::string data;
  std::string model;  // optional: supplies Lambda and the empirical hinge risk
  double lipschitz = 1.0;
  std::optional<double> r_norm;      // default: largest reduced instance norm
  std::optional<double> lambda_cap;  // default: model norm
  double eta = 1.0;
  double delta = 0.05;
  std::optional<double> theta;  // LCL only
  std::optional<double> empirical_risk;
  std::string report_out;
};

struct VerifyOptions {
  std::vector<std::string> checks;  // empty: all
  std::uint64_t seed_begin = 1;
  std::uint64_t seed_end = 10;
  std::string report_out;  // JSON; stdout when empty
};

int cmd_gen(const GenOptions& opt, std::ostream& log);
int cmd_reduce(const ReduceOptions& opt, std::ostream& log);
int cmd_train(const TrainOptions& opt, std::ostream& log);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& log);
int cmd_bound(const BoundOptions& opt, std::ostream& out, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& log);

/// Names accepted by `verify --check`.
const std::vector<std::string>& check_names();

/// Runs one named oracle check for one seed. Throws on an unknown name.
std::vector<VerificationReport> run_check(const std::string& name, std::uint64_t seed);

/// gen -> reduce -> train -> eval -> bound -> verify, driven by one JSON file:
///
///   {"kind": "mcl", "gen": {...}, "solver": {...}, "bound": {...},
///    "outputs": {"dir": "...", ...}, "verify": ["loss-equality", ...]}
struct ExperimentSpec {
  ProblemKind kind = ProblemKind::kMCL;
  GenConfig gen;
  SolverConfig solver;
  double lipschitz = 1.0;
  double eta = 1.0;
  double delta = 0.05;
  std::optional<double> lambda_cap;
  std::string dir = ".";
  std::vector<std::string> verify;

  static ExperimentSpec from_json(const std::string& text);
  void validate() const;
};

int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& log);

/// Wraps a command body: maps ParseError to 3 and other exceptions to 1.
int guarded(std::ostream& log, const std::function<int()>& body);

}  // namespace ermr::cli

#endif  // ERMR_CLI_HPP
