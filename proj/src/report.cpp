#include "ermr/report.hpp"

#include <cmath>

namespace ermr {

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json out;
  out["name"] = name;
  out["passed"] = passed;
  out["lhs"] = lhs;
  out["rhs"] = rhs;
  out["tolerance"] = tolerance;
  out["witness"] = witness ? *witness : nlohmann::ordered_json(nullptr);
  if (!note.empty()) out["note"] = note;
  return out;
}

VerificationReport make_equality_report(std::string name, double lhs, double rhs,
                                        double tolerance) {
  VerificationReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.passed = std::fabs(lhs - rhs) <= tolerance;
  return r;
}

}  // namespace ermr
