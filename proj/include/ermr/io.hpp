#ifndef ERMR_IO_HPP
#define ERMR_IO_HPP

// Line-delimited JSON datasets (one example per line) and JSON model files.
//
//   MIL: {"bag": [[x, ...], ...], "label": -1|1}
//   TRL: {"items": [[x, ...], ...], "target_index": i}
//   MCL: {"features": [x, ...], "label": y, "k": k}
//   LCL: {"features": [x, ...], "label": y, "k": k, "is_true": bool}
//   LCL sidecar: {"true_label": y}
//   model: {"kind": "linear"|"multiclass", "dim": d, "classes": k|null,
//           "weights": [...row-major...], "lambda_cap": cap|null}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ermr/core.hpp"
#include "json.hpp"
#include "ermr/reductions.hpp"

namespace ermr {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dataset read_dataset(std::istream& in, ProblemKind kind);
Dataset read_dataset(const std::filesystem::path& path, ProblemKind kind);
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::filesystem::path& path, const Dataset& data);

std::vector<int> read_true_labels(const std::filesystem::path& path);
void write_true_labels(const std::filesystem::path& path, const std::vector<int>& labels);

using Model = std::variant<LinearWeights, MulticlassWeights>;

Model read_model(const std::filesystem::path& path);
/// `training`, when given, is stored under the "training" key; readers ignore it.
void write_model(const std::filesystem::path& path, const Model& model,
                 const std::optional<nlohmann::ordered_json>& training = std::nullopt);
std::string model_to_string(const Model& model,
                            const std::optional<nlohmann::ordered_json>& training = std::nullopt);
Model model_from_string(const std::string& text);

/// Relative paths resolve under $ERMR_OUTPUT_DIR when that variable is set.
std::filesystem::path output_path(const std::string& path);

}  // namespace ermr

#endif  // ERMR_IO_HPP
