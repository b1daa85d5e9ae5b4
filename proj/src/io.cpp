#include "ermr/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ermr {

using nlohmann::ordered_json;

namespace {

std::string format_parse(std::size_t line, const std::string& message) {
  std::ostringstream out;
  out << "line " << line << ": " << message;
  return out.str();
}

const ordered_json& field(const ordered_json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end()) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return *it;
}

int integer_field(const ordered_json& record, const char* key) {
  const auto& v = field(record, key);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

std::vector<double> vector_field(const ordered_json& v, const char* key) {
  if (!v.is_array()) throw std::invalid_argument(std::string("field \"") + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& c : v) {
    if (!c.is_number()) throw std::invalid_argument(std::string("field \"") + key + "\" must hold numbers");
    out.push_back(c.get<double>());
  }
  return out;
}

std::vector<Instance> instances_field(const ordered_json& record, const char* key) {
  const auto& v = field(record, key);
  if (!v.is_array()) throw std::invalid_argument(std::string("field \"") + key + "\" must be an array of arrays");
  std::vector<Instance> out;
  out.reserve(v.size());
  for (const auto& row : v) out.emplace_back(vector_field(row, key));
  return out;
}

MILExample parse_mil(const ordered_json& r) {
  return MILExample(Bag(instances_field(r, "bag")), integer_field(r, "label"));
}

TRLExample parse_trl(const ordered_json& r) {
  const int target = integer_field(r, "target_index");
  if (target < 0) throw std::out_of_range("target_index must be >= 0");
  return TRLExample(instances_field(r, "items"), static_cast<std::size_t>(target));
}

MCLExample parse_mcl(const ordered_json& r) {
  return MCLExample(Instance(vector_field(field(r, "features"), "features")), integer_field(r, "label"),
                    integer_field(r, "k"));
}

LCLExample parse_lcl(const ordered_json& r) {
  const auto& flag = field(r, "is_true");
  if (!flag.is_boolean()) throw std::invalid_argument("field \"is_true\" must be a boolean");
  return LCLExample(Instance(vector_field(field(r, "features"), "features")), integer_field(r, "label"),
                    flag.get<bool>(), integer_field(r, "k"));
}

ordered_json to_json(std::span<const double> v) { return ordered_json(std::vector<double>(v.begin(), v.end())); }

ordered_json to_json(const std::vector<Instance>& xs) {
  ordered_json arr = ordered_json::array();
  for (const auto& x : xs) arr.push_back(to_json(x.coords()));
  return arr;
}

ordered_json to_json(const MILExample& ex) {
  ordered_json r;
  r["bag"] = to_json(ex.bag().instances());
  r["label"] = ex.label();
  return r;
}

ordered_json to_json(const TRLExample& ex) {
  ordered_json r;
  r["items"] = to_json(ex.items());
  r["target_index"] = ex.target_index();
  return r;
}

ordered_json to_json(const MCLExample& ex) {
  ordered_json r;
  r["features"] = to_json(ex.x().coords());
  r["label"] = ex.label();
  r["k"] = ex.classes();
  return r;
}

ordered_json to_json(const LCLExample& ex) {
  ordered_json r;
  r["features"] = to_json(ex.x().coords());
  r["label"] = ex.label();
  r["k"] = ex.classes();
  r["is_true"] = ex.is_true();
  return r;
}

void check_same_shape(const MILExample& a, const MILExample& b) {
  if (a.bag().dim() != b.bag().dim()) throw DimensionError("bag dimension differs from the first record");
}

void check_same_shape(const TRLExample& a, const TRLExample& b) {
  if (a.dim() != b.dim()) throw DimensionError("item dimension differs from the first record");
}

template <typename Example>
void check_same_shape(const Example& a, const Example& b) {
  if (a.x().dim() != b.x().dim()) throw DimensionError("feature dimension differs from the first record");
  if (a.classes() != b.classes()) throw std::invalid_argument("k differs from the first record");
}

template <typename Example, typename Parse>
std::vector<Example> read_lines(std::istream& in, Parse parse) {
  std::vector<Example> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto record = ordered_json::parse(line);
      if (!record.is_object()) throw std::invalid_argument("record must be a JSON object");
      out.push_back(parse(record));
      if (out.size() > 1) check_same_shape(out.front(), out.back());
    } catch (const ordered_json::exception& e) {
      throw ParseError(number, e.what());
    } catch (const std::logic_error& e) {
      throw ParseError(number, e.what());
    }
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(format_parse(line, message)), line_(line) {}

Dataset read_dataset(std::istream& in, ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kMIL: return read_lines<MILExample>(in, parse_mil);
    case ProblemKind::kTRL: return read_lines<TRLExample>(in, parse_trl);
    case ProblemKind::kMCL: return read_lines<MCLExample>(in, parse_mcl);
    case ProblemKind::kLCL: return read_lines<LCLExample>(in, parse_lcl);
  }
  throw std::invalid_argument("read_dataset: unknown kind");
}

Dataset read_dataset(const std::filesystem::path& path, ProblemKind kind) {
  auto in = open_in(path);
  try {
    return read_dataset(in, kind);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& data) {
  std::visit(
      [&](const auto& examples) {
        for (const auto& ex : examples) out << to_json(ex).dump() << '\n';
      },
      data);
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  write_dataset(out, data);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<int> read_true_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<int> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(integer_field(ordered_json::parse(line), "true_label"));
    } catch (const ordered_json::exception& e) {
      throw ParseError(number, path.string() + ": " + e.what());
    } catch (const std::logic_error& e) {
      throw ParseError(number, path.string() + ": " + e.what());
    }
  }
  return out;
}

void write_true_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int y : labels) {
    ordered_json r;
    r["true_label"] = y;
    out << r.dump() << '\n';
  }
}

std::string model_to_string(const Model& model, const std::optional<ordered_json>& training) {
  ordered_json r;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearWeights>) {
          r["kind"] = "linear";
          r["dim"] = m.dim();
          r["classes"] = nullptr;
          r["weights"] = to_json(m.values());
        } else {
          r["kind"] = "multiclass";
          r["dim"] = m.dim();
          r["classes"] = m.classes();
          r["weights"] = to_json(m.flat());
        }
        if (std::isinf(m.lambda_cap())) {
          r["lambda_cap"] = nullptr;
        } else {
          r["lambda_cap"] = m.lambda_cap();
        }
      },
      model);
  if (training) r["training"] = *training;
  return r.dump(2);
}

Model model_from_string(const std::string& text) {
  try {
    const auto r = ordered_json::parse(text);
    const auto kind = field(r, "kind").get<std::string>();
    const auto weights = vector_field(field(r, "weights"), "weights");
    const auto& cap_field = field(r, "lambda_cap");
    const double cap = cap_field.is_null() ? kUncapped : cap_field.get<double>();
    const int dim = integer_field(r, "dim");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (kind == "linear") {
      if (weights.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("weights length differs from dim");
      return LinearWeights(weights, cap);
    }
    if (kind == "multiclass") {
      return MulticlassWeights(integer_field(r, "classes"), static_cast<std::size_t>(dim), weights, cap);
    }
    throw std::invalid_argument("unknown model kind \"" + kind + "\"");
  } catch (const ordered_json::exception& e) {
    throw ParseError(1, e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(1, e.what());
  }
}

Model read_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return model_from_string(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void write_model(const std::filesystem::path& path, const Model& model,
                 const std::optional<ordered_json>& training) {
  auto out = open_out(path);
  out << model_to_string(model, training) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("ERMR_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / p;
  }
  return p;
}

}  // namespace ermr
