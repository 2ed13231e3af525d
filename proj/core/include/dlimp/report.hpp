#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlimp/lemmas.hpp"

namespace dlimp {

enum class OverallStatus { Pass, Fail, Unknown };

const char* overall_status_name(OverallStatus status);

struct SymbolReport {
  Identifier name;
  std::string family;       // comma-joined member names, empty for numeric-only
  std::string certificate;  // method name, "refused", or "numeric-only"
  std::string evidence;
  bool tainted = false;
};

struct CheckReport {
  Identifier name;
  std::string kind;  // existence | invariant | post | lie | identity
  Verdict verdict = Verdict::NotChecked;
  std::string detail;
  std::optional<double> first_violation;
  int runs = 0;
};

/// Full result of a check run; serializes to stable line-oriented text and to
/// JSON. Sections are sorted by name; no timestamps, so identical inputs give
/// byte-identical reports.
struct RunReport {
  std::string model_path;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double horizon = 10;
  int runs = 0;
  bool assume_existence = false;

  std::vector<SymbolReport> symbols;
  std::vector<Fact> facts;
  std::vector<CheckReport> checks;

  OverallStatus overall = OverallStatus::Pass;
  bool tainted = false;

  void finalize();  // sorts sections, computes overall/tainted

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace dlimp
