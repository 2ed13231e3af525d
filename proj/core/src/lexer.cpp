#include "dlimp/lexer.hpp"

#include <cctype>

#include "dlimp/errors.hpp"

namespace dlimp {

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= text.size(); }
  char peek(size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos < text.size(); ++i, ++pos) {
      if (text[pos] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  }
  bool starts_with(const char* s) const {
    return text.compare(pos, std::char_traits<char>::length(s), s) == 0;
  }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

struct UnicodeAlias {
  const char* utf8;
  TokenKind kind;
  const char* ascii;
};

constexpr UnicodeAlias kAliases[] = {
    {"∀", TokenKind::ForallKw, "\\forall"},
    {"∃", TokenKind::ExistsKw, "\\exists"},
    {"∧", TokenKind::Amp, "&"},
    {"∨", TokenKind::Bar, "|"},
    {"¬", TokenKind::Bang, "!"},
    {"↔", TokenKind::EquivOp, "<->"},
    {"→", TokenKind::Arrow, "->"},
    {"≤", TokenKind::Le, "<="},
    {"≥", TokenKind::Ge, ">="},
    {"≠", TokenKind::Neq, "!="},
    {"∪", TokenKind::ChoiceOp, "++"},
    {"·", TokenKind::Star, "*"},
    {"−", TokenKind::Minus, "-"},
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::Placeholder: return "placeholder";
    case TokenKind::LParen: return "(";
    case TokenKind::RParen: return ")";
    case TokenKind::LBrace: return "{";
    case TokenKind::RBrace: return "}";
    case TokenKind::LBracket: return "[";
    case TokenKind::RBracket: return "]";
    case TokenKind::Plus: return "+";
    case TokenKind::Minus: return "-";
    case TokenKind::Star: return "*";
    case TokenKind::Slash: return "/";
    case TokenKind::Caret: return "^";
    case TokenKind::Lt: return "<";
    case TokenKind::Gt: return ">";
    case TokenKind::Le: return "<=";
    case TokenKind::Ge: return ">=";
    case TokenKind::EqOp: return "=";
    case TokenKind::Neq: return "!=";
    case TokenKind::Amp: return "&";
    case TokenKind::Bar: return "|";
    case TokenKind::Bang: return "!";
    case TokenKind::Arrow: return "->";
    case TokenKind::EquivOp: return "<->";
    case TokenKind::AnnotOpen: return "<<";
    case TokenKind::AnnotClose: return ">>";
    case TokenKind::ChoiceOp: return "++";
    case TokenKind::AssignOp: return ":=";
    case TokenKind::Semi: return ";";
    case TokenKind::Comma: return ",";
    case TokenKind::Question: return "?";
    case TokenKind::Prime: return "'";
    case TokenKind::Dot: return ".";
    case TokenKind::Colon: return ":";
    case TokenKind::Tilde: return "~";
    case TokenKind::ForallKw: return "\\forall";
    case TokenKind::ExistsKw: return "\\exists";
    case TokenKind::EndOfInput: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  Cursor cur{text};

  auto push = [&](TokenKind kind, std::string tok_text, int line, int column) {
    Token t;
    t.kind = kind;
    t.text = std::move(tok_text);
    t.line = line;
    t.column = column;
    tokens.push_back(std::move(t));
  };

  while (!cur.done()) {
    char c = cur.peek();
    int line = cur.line;
    int column = cur.column;

    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '*') {
      cur.advance(2);
      while (!cur.done() && !(cur.peek() == '*' && cur.peek(1) == '/')) cur.advance();
      if (cur.done()) throw SyntaxError(line, column, "unterminated comment");
      cur.advance(2);
      continue;
    }

    if (static_cast<unsigned char>(c) >= 0x80) {
      bool matched = false;
      for (const auto& alias : kAliases) {
        if (cur.starts_with(alias.utf8)) {
          push(alias.kind, alias.ascii, line, column);
          cur.advance(std::char_traits<char>::length(alias.utf8));
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw SyntaxError(line, column, "unexpected non-ASCII character");
      }
      continue;
    }

    if (ident_start(c)) {
      std::string name;
      while (!cur.done() && ident_char(cur.peek())) {
        name += cur.peek();
        cur.advance();
      }
      push(TokenKind::Ident, name, line, column);
      continue;
    }

    if (digit(c)) {
      std::string int_part;
      while (!cur.done() && digit(cur.peek())) {
        int_part += cur.peek();
        cur.advance();
      }
      std::string frac_part;
      if (cur.peek() == '.' && digit(cur.peek(1))) {
        cur.advance();
        while (!cur.done() && digit(cur.peek())) {
          frac_part += cur.peek();
          cur.advance();
        }
      }
      Rational value = Rational::from_decimal_string(int_part, frac_part);
      if ((cur.peek() == 'e' || cur.peek() == 'E')) {
        size_t exp_at = 1;
        if (cur.peek(1) == '+' || cur.peek(1) == '-') exp_at = 2;
        if (digit(cur.peek(exp_at))) {
          cur.advance();  // e
          bool negative = false;
          if (cur.peek() == '+' || cur.peek() == '-') {
            negative = cur.peek() == '-';
            cur.advance();
          }
          long long exponent = 0;
          while (!cur.done() && digit(cur.peek())) {
            exponent = exponent * 10 + (cur.peek() - '0');
            cur.advance();
          }
          Rational ten(10);
          Rational scale(1);
          for (long long i = 0; i < exponent; ++i) scale = scale * ten;
          value = negative ? value / scale : value * scale;
        }
      }
      Token t;
      t.kind = TokenKind::Number;
      t.number = value;
      t.line = line;
      t.column = column;
      tokens.push_back(std::move(t));
      continue;
    }

    if (c == '.') {
      if (cur.peek(1) == '_' && digit(cur.peek(2))) {
        cur.advance(2);
        int index = 0;
        while (!cur.done() && digit(cur.peek())) {
          index = index * 10 + (cur.peek() - '0');
          cur.advance();
        }
        Token t;
        t.kind = TokenKind::Placeholder;
        t.placeholder = index;
        t.text = placeholder(index);
        t.line = line;
        t.column = column;
        tokens.push_back(std::move(t));
        continue;
      }
      push(TokenKind::Dot, ".", line, column);
      cur.advance();
      continue;
    }

    if (c == '\\') {
      std::string word;
      cur.advance();
      while (!cur.done() && ident_char(cur.peek())) {
        word += cur.peek();
        cur.advance();
      }
      if (word == "forall") {
        push(TokenKind::ForallKw, "\\forall", line, column);
      } else if (word == "exists") {
        push(TokenKind::ExistsKw, "\\exists", line, column);
      } else {
        throw SyntaxError(line, column, "unknown escape \\" + word);
      }
      continue;
    }

    auto two = [&](const char* pat, TokenKind kind) {
      if (cur.starts_with(pat)) {
        push(kind, pat, line, column);
        cur.advance(std::char_traits<char>::length(pat));
        return true;
      }
      return false;
    };

    if (two("<->", TokenKind::EquivOp)) continue;
    if (two("<<", TokenKind::AnnotOpen)) continue;
    if (two(">>", TokenKind::AnnotClose)) continue;
    if (two("<=", TokenKind::Le)) continue;
    if (two(">=", TokenKind::Ge)) continue;
    if (two("!=", TokenKind::Neq)) continue;
    if (two("->", TokenKind::Arrow)) continue;
    if (two("++", TokenKind::ChoiceOp)) continue;
    if (two(":=", TokenKind::AssignOp)) continue;

    TokenKind kind;
    switch (c) {
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '{': kind = TokenKind::LBrace; break;
      case '}': kind = TokenKind::RBrace; break;
      case '[': kind = TokenKind::LBracket; break;
      case ']': kind = TokenKind::RBracket; break;
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      case '^': kind = TokenKind::Caret; break;
      case '<': kind = TokenKind::Lt; break;
      case '>': kind = TokenKind::Gt; break;
      case '=': kind = TokenKind::EqOp; break;
      case '&': kind = TokenKind::Amp; break;
      case '|': kind = TokenKind::Bar; break;
      case '!': kind = TokenKind::Bang; break;
      case ';': kind = TokenKind::Semi; break;
      case ',': kind = TokenKind::Comma; break;
      case '?': kind = TokenKind::Question; break;
      case '\'': kind = TokenKind::Prime; break;
      case ':': kind = TokenKind::Colon; break;
      case '~': kind = TokenKind::Tilde; break;
      default:
        throw SyntaxError(line, column, std::string("unexpected character '") + c + "'");
    }
    push(kind, std::string(1, c), line, column);
    cur.advance();
  }

  Token eof;
  eof.kind = TokenKind::EndOfInput;
  eof.line = cur.line;
  eof.column = cur.column;
  tokens.push_back(std::move(eof));
  return tokens;
}

}  // namespace dlimp
