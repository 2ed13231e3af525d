#pragma once

#include <string>
#include <vector>

#include "dlimp/rational.hpp"
#include "dlimp/syntax.hpp"

namespace dlimp {

enum class TokenKind {
  Ident,
  Number,       // exact rational payload
  Placeholder,  // ._k
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Plus, Minus, Star, Slash, Caret,
  Lt, Gt, Le, Ge, EqOp, Neq,
  Amp, Bar, Bang, Arrow, EquivOp,
  AnnotOpen,   // <<
  AnnotClose,  // >>
  ChoiceOp,    // ++
  AssignOp,    // :=
  Semi, Comma, Question, Prime, Dot, Colon, Tilde,
  ForallKw,  // \forall
  ExistsKw,  // \exists
  EndOfInput,
};

struct Token {
  TokenKind kind;
  std::string text;
  Rational number;       // Number
  int placeholder = -1;  // Placeholder
  int line = 1;
  int column = 1;
};

/// Tokenizes UTF-8 input. Comments (/* ... */) are discarded. Unicode
/// operator aliases are accepted and mapped to their ASCII tokens.
/// Throws SyntaxError on malformed input.
std::vector<Token> tokenize(const std::string& text);

const char* token_kind_name(TokenKind kind);

}  // namespace dlimp
