#pragma once

#include <string>

#include "dlimp/syntax.hpp"

namespace dlimp {

/// Deterministic canonical ASCII printing. parse(print(ast)) is structurally
/// equal to ast for every well-formed tree. Builtin symbols print by short
/// name; user-defined symbols print with their full `name<<...>>` annotation.
std::string print(const Term& term);
std::string print(const Formula& formula);
std::string print(const HybridProgram& program);

/// Annotation body of a symbol as a standalone string (no surrounding
/// `name<<` / `>>`).
std::string print_interpretation(const InterpretedSymbol& symbol);

}  // namespace dlimp
