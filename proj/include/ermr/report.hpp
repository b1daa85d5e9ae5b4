#ifndef ERMR_REPORT_HPP
#define ERMR_REPORT_HPP

#include <optional>
#include <string>

#include "json.hpp"

namespace ermr {

/// Pass/fail evidence for one property check. passed <=> |lhs - rhs| <= tolerance,
/// except for one-sided checks, which say so in `name`.
struct VerificationReport {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::optional<nlohmann::ordered_json> witness;
  std::string note;

  nlohmann::ordered_json to_json() const;
};

VerificationReport make_equality_report(std::string name, double lhs, double rhs,
                                        double tolerance);

}  // namespace ermr

#endif  // ERMR_REPORT_HPP
