#include "dlimp/parser.hpp"

#include "dlimp/errors.hpp"

namespace dlimp {

Parser::Parser(std::vector<Token> tokens, SymbolTable symbols)
    : tokens_(std::move(tokens)), symbols_(std::move(symbols)) {}

const Token& Parser::peek(int ahead) const {
  size_t i = index_ + static_cast<size_t>(ahead);
  if (i >= tokens_.size()) i = tokens_.size() - 1;  // EndOfInput sentinel
  return tokens_[i];
}

bool Parser::at_word(const std::string& word) const {
  return peek().kind == TokenKind::Ident && peek().text == word;
}

bool Parser::accept(TokenKind kind) {
  if (peek().kind == kind) {
    ++index_;
    return true;
  }
  return false;
}

bool Parser::accept_word(const std::string& word) {
  if (at_word(word)) {
    ++index_;
    return true;
  }
  return false;
}

Token Parser::expect(TokenKind kind) {
  if (peek().kind != kind) {
    fail(std::string("expected '") + token_kind_name(kind) + "', found '" +
             token_kind_name(peek().kind) + "'",
         {token_kind_name(kind)});
  }
  return tokens_[index_++];
}

Identifier Parser::expect_ident() { return expect(TokenKind::Ident).text; }

void Parser::expect_word(const std::string& word) {
  if (!accept_word(word)) {
    fail("expected '" + word + "'", {word});
  }
}

void Parser::fail(const std::string& message, std::vector<std::string> expected) const {
  const Token& t = peek();
  throw SyntaxError(t.line, t.column, message, std::move(expected));
}

void Parser::add_symbol(const InterpretedSymbol& symbol) {
  symbols_.insert_or_assign(symbol.name(), symbol);
}

Rational Parser::number() {
  bool negative = accept(TokenKind::Minus);
  Token t = expect(TokenKind::Number);
  Rational value = t.number;
  if (accept(TokenKind::Slash)) {
    Token den = expect(TokenKind::Number);
    if (den.number.is_zero()) fail("zero denominator");
    value = value / den.number;
  }
  return negative ? -value : value;
}

// ---------------------------------------------------------------------------
// Terms.

Term Parser::term() { return term_add(); }

Term Parser::term_add() {
  Term acc = term_mul();
  for (;;) {
    if (accept(TokenKind::Plus)) {
      acc = Term::plus(acc, term_mul());
    } else if (accept(TokenKind::Minus)) {
      acc = Term::plus(acc, Term::negate(term_mul()));
    } else {
      return acc;
    }
  }
}

Term Parser::term_mul() {
  Term acc = term_unary();
  for (;;) {
    if (accept(TokenKind::Star)) {
      acc = Term::times(acc, term_unary());
    } else if (accept(TokenKind::Slash)) {
      acc = Term::divide(acc, term_unary());
    } else {
      return acc;
    }
  }
}

Term Parser::term_unary() {
  if (at(TokenKind::Minus)) {
    // "-5" folds to a negative literal unless a postfix operator follows
    // (so that -2^2 keeps the -(2^2) reading).
    if (peek(1).kind == TokenKind::Number && peek(2).kind != TokenKind::Caret &&
        peek(2).kind != TokenKind::Prime) {
      ++index_;
      Token t = expect(TokenKind::Number);
      return Term::rational(-t.number);
    }
    ++index_;
    return Term::negate(term_unary());
  }
  return term_postfix();
}

Term Parser::term_postfix() {
  Term acc = term_primary();
  for (;;) {
    if (at(TokenKind::Caret)) {
      ++index_;
      Token t = expect(TokenKind::Number);
      if (!t.number.is_integer() || t.number.is_negative()) {
        fail("exponent must be a non-negative integer literal");
      }
      long long k = t.number.num().convert_to<long long>();
      if (k > 64) fail("exponent too large");
      if (k == 0) {
        acc = Term::rational(1);
      } else {
        Term base = acc;
        for (long long i = 1; i < k; ++i) acc = Term::times(acc, base);
      }
    } else if (at(TokenKind::Prime)) {
      ++index_;
      acc = Term::differential(acc);
    } else {
      return acc;
    }
  }
}

std::vector<Term> Parser::call_args() {
  expect(TokenKind::LParen);
  std::vector<Term> args;
  if (!at(TokenKind::RParen)) {
    args.push_back(term());
    while (accept(TokenKind::Comma)) args.push_back(term());
  }
  expect(TokenKind::RParen);
  return args;
}

Term Parser::term_primary() {
  const Token& t = peek();
  switch (t.kind) {
    case TokenKind::Number: {
      ++index_;
      return Term::rational(t.number);
    }
    case TokenKind::Placeholder: {
      ++index_;
      return Term::variable(t.text);
    }
    case TokenKind::LParen: {
      ++index_;
      Term inner = term();
      expect(TokenKind::RParen);
      return inner;
    }
    case TokenKind::Ident: {
      Identifier name = t.text;
      ++index_;
      if (at(TokenKind::AnnotOpen)) {
        ++index_;
        Formula interpretation = formula();
        expect(TokenKind::AnnotClose);
        std::vector<Term> args = call_args();
        InterpretedSymbol sym = InterpretedSymbol::defined(
            name, static_cast<int>(args.size()), interpretation, /*builtin=*/false);
        return Term::func_app(sym, std::move(args));
      }
      if (at(TokenKind::LParen)) {
        auto it = symbols_.find(name);
        if (it == symbols_.end()) {
          fail(name + " is not a declared function symbol");
        }
        std::vector<Term> args = call_args();
        if (static_cast<int>(args.size()) != it->second.arity()) {
          fail("function " + name + " expects " +
               std::to_string(it->second.arity()) + " argument(s)");
        }
        return Term::func_app(it->second, std::move(args));
      }
      return Term::variable(name);
    }
    default:
      fail("expected a term", {"number", "identifier", "("});
  }
}

// ---------------------------------------------------------------------------
// Formulas.

Formula Parser::formula() { return formula_equiv(); }

Formula Parser::formula_equiv() {
  Formula lhs = formula_imply();
  if (accept(TokenKind::EquivOp)) {
    Formula rhs = formula_imply();
    return Formula::equiv(lhs, rhs);
  }
  return lhs;
}

Formula Parser::formula_imply() {
  Formula lhs = formula_or();
  if (accept(TokenKind::Arrow)) {
    return Formula::imply(lhs, formula_imply());
  }
  return lhs;
}

Formula Parser::formula_or() {
  Formula lhs = formula_and();
  if (accept(TokenKind::Bar)) {
    return Formula::disj(lhs, formula_or());
  }
  return lhs;
}

Formula Parser::formula_and() {
  Formula lhs = formula_unary();
  if (accept(TokenKind::Amp)) {
    return Formula::conj(lhs, formula_and());
  }
  return lhs;
}

Formula Parser::formula_unary() {
  if (accept(TokenKind::Bang)) {
    return Formula::negation(formula_unary());
  }
  if (accept(TokenKind::ForallKw)) {
    Identifier binder = expect_ident();
    return Formula::forall(binder, formula_unary());
  }
  if (accept(TokenKind::ExistsKw)) {
    Identifier binder = expect_ident();
    return Formula::exists(binder, formula_unary());
  }
  if (accept(TokenKind::LBracket)) {
    HybridProgram prog = program();
    expect(TokenKind::RBracket);
    return Formula::box(prog, formula_unary());
  }
  if (at(TokenKind::Lt)) {
    ++index_;
    HybridProgram prog = program();
    expect(TokenKind::Gt);
    return Formula::diamond(prog, formula_unary());
  }
  return formula_atom();
}

Formula Parser::formula_atom() {
  if (at_word("true")) {
    ++index_;
    return Formula::truth(true);
  }
  if (at_word("false")) {
    ++index_;
    return Formula::truth(false);
  }
  if (at(TokenKind::LParen)) {
    // Could be a parenthesized formula or a parenthesized term inside a
    // comparison; try the formula reading and fall back.
    size_t mark = save();
    ++index_;
    try {
      Formula inner = formula();
      expect(TokenKind::RParen);
      switch (peek().kind) {
        case TokenKind::Plus:
        case TokenKind::Minus:
        case TokenKind::Star:
        case TokenKind::Slash:
        case TokenKind::Caret:
        case TokenKind::Prime:
        case TokenKind::EqOp:
        case TokenKind::Neq:
        case TokenKind::Lt:
        case TokenKind::Gt:
        case TokenKind::Le:
        case TokenKind::Ge:
          break;  // actually a term context; reparse below
        default:
          return inner;
      }
    } catch (const SyntaxError&) {
      // fall through to the comparison reading
    }
    restore(mark);
  }
  return comparison();
}

Formula Parser::comparison() {
  Term lhs = term();
  CompareOp op;
  switch (peek().kind) {
    case TokenKind::EqOp: op = CompareOp::Eq; break;
    case TokenKind::Neq: op = CompareOp::Neq; break;
    case TokenKind::Ge: op = CompareOp::Ge; break;
    case TokenKind::Gt: op = CompareOp::Gt; break;
    case TokenKind::Le: op = CompareOp::Le; break;
    case TokenKind::Lt: op = CompareOp::Lt; break;
    default:
      fail("expected a comparison operator", {"=", "!=", ">=", ">", "<=", "<"});
  }
  ++index_;
  Term rhs = term();
  return Formula::compare(op, lhs, rhs);
}

// ---------------------------------------------------------------------------
// Programs.

HybridProgram Parser::program() { return program_choice(); }

HybridProgram Parser::program_choice() {
  HybridProgram lhs = program_sequence();
  if (accept(TokenKind::ChoiceOp)) {
    return HybridProgram::choice(lhs, program_choice());
  }
  return lhs;
}

bool Parser::starts_program_unit() const {
  switch (peek().kind) {
    case TokenKind::Question:
    case TokenKind::LBrace:
      return true;
    case TokenKind::Ident:
      if (peek().text == "if") return true;
      return peek(1).kind == TokenKind::AssignOp;
    default:
      return false;
  }
}

HybridProgram Parser::program_sequence() {
  if (!starts_program_unit()) {
    fail("expected a program", {"?", "{", "identifier", "if"});
  }
  HybridProgram acc = program_unit();
  while (starts_program_unit()) {
    acc = HybridProgram::sequence(acc, program_unit());
  }
  return acc;
}

HybridProgram Parser::program_unit() {
  if (accept(TokenKind::Question)) {
    Formula cond = formula();
    accept(TokenKind::Semi);
    return HybridProgram::test(cond);
  }
  if (at_word("if")) {
    ++index_;
    expect(TokenKind::LParen);
    Formula cond = formula();
    expect(TokenKind::RParen);
    expect(TokenKind::LBrace);
    HybridProgram body = program();
    expect(TokenKind::RBrace);
    return HybridProgram::if_then(cond, body);
  }
  if (at(TokenKind::Ident)) {
    Identifier var = expect_ident();
    expect(TokenKind::AssignOp);
    if (accept(TokenKind::Star)) {
      accept(TokenKind::Semi);
      return HybridProgram::assign_any(var);
    }
    Term value = term();
    accept(TokenKind::Semi);
    return HybridProgram::assign(var, value);
  }
  if (at(TokenKind::LBrace)) {
    HybridProgram inner = braced_program_or_ode();
    if (accept(TokenKind::Star)) {
      return HybridProgram::loop(inner);
    }
    return inner;
  }
  fail("expected a program statement");
}

HybridProgram Parser::braced_program_or_ode() {
  expect(TokenKind::LBrace);
  // ODE when the braces open with ident'=
  if (peek().kind == TokenKind::Ident && peek(1).kind == TokenKind::Prime &&
      peek(2).kind == TokenKind::EqOp) {
    std::vector<OdeEquation> equations;
    for (;;) {
      Identifier lhs = expect_ident();
      expect(TokenKind::Prime);
      expect(TokenKind::EqOp);
      Term rhs = term();
      equations.emplace_back(lhs, rhs);
      if (!accept(TokenKind::Comma)) break;
    }
    Formula domain = Formula::truth(true);
    if (accept(TokenKind::Amp)) {
      domain = formula();
    }
    expect(TokenKind::RBrace);
    return HybridProgram::ode(std::move(equations), domain);
  }
  HybridProgram inner = program();
  expect(TokenKind::RBrace);
  return inner;
}

// ---------------------------------------------------------------------------
// Whole-input entry points.

Term Parser::parse_term_all() {
  Term t = term();
  if (!at(TokenKind::EndOfInput)) fail("trailing input after term");
  return t;
}

Formula Parser::parse_formula_all() {
  Formula f = formula();
  if (!at(TokenKind::EndOfInput)) fail("trailing input after formula");
  return f;
}

HybridProgram Parser::parse_program_all() {
  HybridProgram p = program();
  accept(TokenKind::Semi);
  if (!at(TokenKind::EndOfInput)) fail("trailing input after program");
  return p;
}

Term parse_term(const std::string& text, const SymbolTable& symbols) {
  Parser parser(tokenize(text), symbols);
  return parser.parse_term_all();
}

Formula parse_formula(const std::string& text, const SymbolTable& symbols) {
  Parser parser(tokenize(text), symbols);
  return parser.parse_formula_all();
}

HybridProgram parse_program(const std::string& text, const SymbolTable& symbols) {
  Parser parser(tokenize(text), symbols);
  return parser.parse_program_all();
}

}  // namespace dlimp
