#pragma once

#include <optional>

#include "dlimp/model.hpp"
#include "dlimp/report.hpp"

namespace dlimp {

/// Command-line overrides; unset fields fall back to the model's Checks
/// config, then to defaults.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> horizon;
  std::optional<double> tolerance;
  bool assume_existence = false;
  bool lemmas_only = false;
};

/// Certifies the model's symbols, derives and validates the per-family
/// lemmas, and (unless lemmas_only) executes the declared checks over seeded
/// simulations.
RunReport run_model_checks(const ParsedModel& parsed, const std::string& path,
                           const RunOptions& options);

/// Function symbols referenced by the model (implicit declarations plus every
/// application in the problem and checks).
std::set<Identifier> referenced_symbols(const ModelFile& model);

}  // namespace dlimp
