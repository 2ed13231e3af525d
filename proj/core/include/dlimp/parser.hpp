#pragma once

#include <map>
#include <string>
#include <vector>

#include "dlimp/lexer.hpp"
#include "dlimp/syntax.hpp"

namespace dlimp {

/// Short-name resolution for function applications: `sin(x)` only parses when
/// "sin" is in the table (or carries an inline `<<...>>` annotation).
using SymbolTable = std::map<Identifier, InterpretedSymbol>;

/// Recursive-descent parser over a token stream. Pure and reentrant; one
/// instance per parse. Model-file parsing (model.hpp) drives the same
/// machinery through the incremental interface.
class Parser {
 public:
  Parser(std::vector<Token> tokens, SymbolTable symbols);

  Term parse_term_all();
  Formula parse_formula_all();
  HybridProgram parse_program_all();

  // Incremental interface.
  Term term();
  Formula formula();
  HybridProgram program();
  Rational number();

  const Token& peek(int ahead = 0) const;
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool at_word(const std::string& word) const;
  bool accept(TokenKind kind);
  bool accept_word(const std::string& word);
  Token expect(TokenKind kind);
  Identifier expect_ident();
  void expect_word(const std::string& word);
  [[noreturn]] void fail(const std::string& message,
                         std::vector<std::string> expected = {}) const;

  size_t save() const { return index_; }
  void restore(size_t index) { index_ = index; }

  void add_symbol(const InterpretedSymbol& symbol);
  const SymbolTable& symbols() const { return symbols_; }

 private:
  Term term_add();
  Term term_mul();
  Term term_unary();
  Term term_postfix();
  Term term_primary();
  std::vector<Term> call_args();

  Formula formula_equiv();
  Formula formula_imply();
  Formula formula_or();
  Formula formula_and();
  Formula formula_unary();
  Formula formula_atom();
  Formula comparison();

  HybridProgram program_choice();
  HybridProgram program_sequence();
  HybridProgram program_unit();
  bool starts_program_unit() const;
  HybridProgram braced_program_or_ode();

  std::vector<Token> tokens_;
  SymbolTable symbols_;
  size_t index_ = 0;
};

/// Entry point used by tests and the CLI: parses one expression of the hinted
/// category against the builtin symbol table (plus `extra` symbols).
enum class ExprCategory { TermExpr, FormulaExpr, ProgramExpr };
Term parse_term(const std::string& text, const SymbolTable& symbols);
Formula parse_formula(const std::string& text, const SymbolTable& symbols);
HybridProgram parse_program(const std::string& text, const SymbolTable& symbols);

}  // namespace dlimp
