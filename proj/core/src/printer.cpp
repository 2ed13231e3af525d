#include "dlimp/printer.hpp"

#include <sstream>

namespace dlimp {

namespace {

// Term precedence levels, loosest to tightest:
//   1 addition (+, binary -)
//   2 multiplication (*, /)
//   3 unary minus
//   4 postfix ' and atoms
enum { PREC_ADD = 1, PREC_MUL = 2, PREC_NEG = 3, PREC_ATOM = 4 };

void print_term(std::ostringstream& out, const Term& t, int parent_prec);

bool is_negative_literal(const Term& t) {
  return t.kind() == TermKind::Rational && t.rational_value().is_negative();
}

void print_term(std::ostringstream& out, const Term& t, int parent_prec) {
  switch (t.kind()) {
    case TermKind::Variable:
      out << t.var_name();
      return;
    case TermKind::Rational: {
      // A negative literal prints like a unary-minus expression.
      int prec = t.rational_value().is_negative() ? PREC_NEG : PREC_ATOM;
      if (prec < parent_prec) out << "(";
      out << t.rational_value().to_string();
      if (prec < parent_prec) out << ")";
      return;
    }
    case TermKind::Plus: {
      if (PREC_ADD < parent_prec) out << "(";
      print_term(out, t.lhs(), PREC_ADD);
      // Render a + (-b) as subtraction.
      const Term& r = t.rhs();
      if (r.kind() == TermKind::Negate) {
        out << "-";
        print_term(out, r.operand(), PREC_MUL);
      } else if (is_negative_literal(r)) {
        // "a+(-1)": keeps Plus(a, -1) distinct from Plus(a, Negate(1)).
        out << "+(" << r.rational_value().to_string() << ")";
      } else {
        out << "+";
        print_term(out, r, PREC_ADD + 1);
      }
      if (PREC_ADD < parent_prec) out << ")";
      return;
    }
    case TermKind::Times: {
      if (PREC_MUL < parent_prec) out << "(";
      print_term(out, t.lhs(), PREC_MUL);
      out << "*";
      print_term(out, t.rhs(), PREC_MUL + 1);
      if (PREC_MUL < parent_prec) out << ")";
      return;
    }
    case TermKind::Divide: {
      if (PREC_MUL < parent_prec) out << "(";
      print_term(out, t.lhs(), PREC_MUL);
      out << "/";
      print_term(out, t.rhs(), PREC_MUL + 1);
      if (PREC_MUL < parent_prec) out << ")";
      return;
    }
    case TermKind::Negate: {
      if (PREC_NEG < parent_prec) out << "(";
      out << "-";
      const Term& inner = t.operand();
      // "-(1)" keeps Negate(literal) distinct from a negative literal.
      if (inner.kind() == TermKind::Rational) {
        out << "(" << inner.rational_value().to_string() << ")";
      } else {
        print_term(out, inner, PREC_NEG);
      }
      if (PREC_NEG < parent_prec) out << ")";
      return;
    }
    case TermKind::Differential:
      out << "(";
      print_term(out, t.operand(), 0);
      out << ")'";
      return;
    case TermKind::FuncApp: {
      const InterpretedSymbol& sym = t.symbol();
      out << sym.name();
      if (!sym.is_builtin() && sym.has_interpretation()) {
        out << "<<" << print(sym.interpretation()) << ">>";
      }
      out << "(";
      bool first = true;
      for (const Term& a : t.args()) {
        if (!first) out << ",";
        first = false;
        print_term(out, a, 0);
      }
      out << ")";
      return;
    }
  }
}

// Formula precedence, loosest to tightest: <-> , -> , | , & , unary/atom.
enum { FPREC_EQUIV = 1, FPREC_IMPLY = 2, FPREC_OR = 3, FPREC_AND = 4, FPREC_UNARY = 5 };

void print_formula(std::ostringstream& out, const Formula& f, int parent_prec);
void print_program(std::ostringstream& out, const HybridProgram& p);

void print_formula(std::ostringstream& out, const Formula& f, int parent_prec) {
  switch (f.kind()) {
    case FormulaKind::True:
      out << "true";
      return;
    case FormulaKind::False:
      out << "false";
      return;
    case FormulaKind::Compare:
      print_term(out, f.lhs_term(), 0);
      out << compare_op_text(f.op());
      print_term(out, f.rhs_term(), 0);
      return;
    case FormulaKind::And: {
      if (FPREC_AND < parent_prec) out << "(";
      print_formula(out, f.lhs(), FPREC_AND + 1);
      out << "&";
      print_formula(out, f.rhs(), FPREC_AND);  // right associative
      if (FPREC_AND < parent_prec) out << ")";
      return;
    }
    case FormulaKind::Or: {
      if (FPREC_OR < parent_prec) out << "(";
      print_formula(out, f.lhs(), FPREC_OR + 1);
      out << "|";
      print_formula(out, f.rhs(), FPREC_OR);
      if (FPREC_OR < parent_prec) out << ")";
      return;
    }
    case FormulaKind::Imply: {
      if (FPREC_IMPLY < parent_prec) out << "(";
      print_formula(out, f.lhs(), FPREC_IMPLY + 1);
      out << "->";
      print_formula(out, f.rhs(), FPREC_IMPLY);
      if (FPREC_IMPLY < parent_prec) out << ")";
      return;
    }
    case FormulaKind::Equiv: {
      if (FPREC_EQUIV < parent_prec) out << "(";
      print_formula(out, f.lhs(), FPREC_EQUIV + 1);
      out << "<->";
      print_formula(out, f.rhs(), FPREC_EQUIV + 1);  // non associative
      if (FPREC_EQUIV < parent_prec) out << ")";
      return;
    }
    case FormulaKind::Not:
      out << "!";
      if (f.operand().kind() == FormulaKind::Compare ||
          f.operand().kind() == FormulaKind::True ||
          f.operand().kind() == FormulaKind::False) {
        out << "(";
        print_formula(out, f.operand(), 0);
        out << ")";
      } else {
        print_formula(out, f.operand(), FPREC_UNARY);
      }
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out << (f.kind() == FormulaKind::Forall ? "\\forall " : "\\exists ");
      out << f.binder() << " (";
      print_formula(out, f.body(), 0);
      out << ")";
      return;
    case FormulaKind::Box:
      out << "[";
      print_program(out, f.program());
      out << "](";
      print_formula(out, f.post(), 0);
      out << ")";
      return;
    case FormulaKind::Diamond:
      out << "<";
      print_program(out, f.program());
      out << ">(";
      print_formula(out, f.post(), 0);
      out << ")";
      return;
  }
}

void flatten_sequence(const HybridProgram& p, std::vector<HybridProgram>& out) {
  if (p.kind() == ProgramKind::Sequence) {
    flatten_sequence(p.lhs(), out);
    flatten_sequence(p.rhs(), out);
  } else {
    out.push_back(p);
  }
}

// A sequence element that must be braced to survive reparsing.
void print_seq_element(std::ostringstream& out, const HybridProgram& p) {
  if (p.kind() == ProgramKind::Choice) {
    out << "{";
    print_program(out, p);
    out << "}";
  } else {
    print_program(out, p);
  }
}

void print_program(std::ostringstream& out, const HybridProgram& p) {
  switch (p.kind()) {
    case ProgramKind::Test:
      out << "?";
      print_formula(out, p.condition(), FPREC_UNARY);
      out << ";";
      return;
    case ProgramKind::Assign:
      out << p.var() << ":=";
      print_term(out, p.value(), 0);
      out << ";";
      return;
    case ProgramKind::AssignAny:
      out << p.var() << ":=*;";
      return;
    case ProgramKind::ODESystem: {
      out << "{";
      bool first = true;
      for (const auto& [lhs, rhs] : p.equations()) {
        if (!first) out << ",";
        first = false;
        out << lhs << "'=";
        print_term(out, rhs, 0);
      }
      if (p.domain().kind() != FormulaKind::True) {
        out << " & ";
        print_formula(out, p.domain(), 0);
      }
      out << "}";
      return;
    }
    case ProgramKind::Choice:
      out << "{";
      print_program(out, p.lhs());
      out << "}++{";
      print_program(out, p.rhs());
      out << "}";
      return;
    case ProgramKind::Sequence: {
      std::vector<HybridProgram> units;
      flatten_sequence(p, units);
      for (const HybridProgram& u : units) print_seq_element(out, u);
      return;
    }
    case ProgramKind::Loop:
      out << "{";
      print_program(out, p.body());
      out << "}*";
      return;
    case ProgramKind::IfThen:
      out << "if (";
      print_formula(out, p.condition(), 0);
      out << ") {";
      print_program(out, p.body());
      out << "}";
      return;
  }
}

}  // namespace

std::string print(const Term& term) {
  std::ostringstream out;
  print_term(out, term, 0);
  return out.str();
}

std::string print(const Formula& formula) {
  std::ostringstream out;
  print_formula(out, formula, 0);
  return out.str();
}

std::string print(const HybridProgram& program) {
  std::ostringstream out;
  print_program(out, program);
  return out.str();
}

std::string print_interpretation(const InterpretedSymbol& symbol) {
  return symbol.has_interpretation() ? print(symbol.interpretation()) : std::string();
}

}  // namespace dlimp
