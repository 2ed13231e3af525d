#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlimp/definitions.hpp"
#include "dlimp/parser.hpp"

namespace dlimp {

bool operator==(const ImplicitDecl& a, const ImplicitDecl& b);

/// Nullary term abbreviation (`Real name = term;`), expanded textually after
/// parsing.
struct TermAbbrev {
  Identifier name;
  Term body = Term::rational(0);
  bool operator==(const TermAbbrev&) const = default;
};

struct GridSpec {
  Identifier var;
  Term lo = Term::rational(0);
  Term hi = Term::rational(0);
  long points = 0;
  bool operator==(const GridSpec&) const = default;
};

struct SampleRange {
  Identifier name;
  Term lo = Term::rational(0);
  Term hi = Term::rational(0);
  bool operator==(const SampleRange&) const = default;
};

/// One declarative check. Invariants are monitored along simulated traces;
/// lie checks compare the Lie derivative of a term against an expected term;
/// identities compare two terms along traces or over a grid.
struct CheckItem {
  enum class Kind { Invariant, Lie, Identity };
  Kind kind = Kind::Invariant;
  Identifier name;
  Formula formula = Formula::truth(true);  // Invariant
  Term lhs = Term::rational(0);            // Lie target / identity lhs
  Term rhs = Term::rational(0);            // Lie expected / identity rhs
  Rational tol = Rational(1, 1000000);     // lie tolerance
  Rational abs_tol = Rational(1, 100000000);
  Rational rel_tol = Rational(0);
  std::optional<GridSpec> grid;
  bool operator==(const CheckItem&) const = default;
};

struct ChecksBlock {
  std::vector<std::pair<std::string, Rational>> config;  // runs, seed, horizon, tol
  std::vector<std::pair<Identifier, Term>> fixes;
  std::vector<SampleRange> samples;
  std::vector<std::pair<Identifier, Term>> inits;
  std::vector<SampleRange> ranges;  // assign-any sampler ranges
  bool monitor_post = false;
  std::vector<CheckItem> items;
  bool operator==(const ChecksBlock&) const = default;

  std::optional<Rational> config_value(const std::string& key) const;
};

/// Parsed model file: Definitions / ProgramVariables / Problem blocks plus
/// the optional Checks block. Abbreviations are stored raw; the problem and
/// check expressions are stored with abbreviations already expanded.
struct ModelFile {
  std::vector<Identifier> constants;
  std::vector<ImplicitDecl> implicits;
  std::vector<TermAbbrev> abbreviations;
  std::vector<Identifier> program_variables;
  Formula problem = Formula::truth(true);
  std::optional<ChecksBlock> checks;
  bool operator==(const ModelFile&) const = default;
};

struct ParsedModel {
  ModelFile model;
  Registry registry;  // builtins plus the model's implicit declarations
};

/// Parses a model file. Throws SyntaxError with line/column on malformed
/// input and DeclarationError for undeclared identifiers.
ParsedModel parse_model(const std::string& text);

std::string print_model(const ModelFile& model);

/// Splits `assumptions -> [program] post` (right-nested implications allowed)
/// into its parts; nullopt when the conclusion is not a box formula.
struct ProblemShape {
  std::vector<Formula> assumptions;
  HybridProgram program = HybridProgram::test(Formula::truth(true));
  Formula postcondition = Formula::truth(true);
};
std::optional<ProblemShape> split_problem(const Formula& problem);

}  // namespace dlimp
