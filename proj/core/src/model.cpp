#include "dlimp/model.hpp"

#include <sstream>

#include "dlimp/errors.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

bool operator==(const ImplicitDecl& a, const ImplicitDecl& b) {
  return a.names == b.names && a.argument == b.argument &&
         a.init_assignments == b.init_assignments && a.ode == b.ode;
}

std::optional<Rational> ChecksBlock::config_value(const std::string& key) const {
  for (const auto& [k, v] : config) {
    if (k == key) return v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Textual macro expansion of abbreviations (capture is intended).

namespace {

Term expand_var(const Term& t, const Identifier& name, const Term& body);
Formula expand_var(const Formula& f, const Identifier& name, const Term& body);
HybridProgram expand_var(const HybridProgram& p, const Identifier& name,
                         const Term& body);

Term expand_var(const Term& t, const Identifier& name, const Term& body) {
  switch (t.kind()) {
    case TermKind::Variable:
      return t.var_name() == name ? body : t;
    case TermKind::Rational:
      return t;
    case TermKind::Plus:
      return Term::plus(expand_var(t.lhs(), name, body), expand_var(t.rhs(), name, body));
    case TermKind::Times:
      return Term::times(expand_var(t.lhs(), name, body), expand_var(t.rhs(), name, body));
    case TermKind::Divide:
      return Term::divide(expand_var(t.lhs(), name, body), expand_var(t.rhs(), name, body));
    case TermKind::Negate:
      return Term::negate(expand_var(t.operand(), name, body));
    case TermKind::Differential:
      return Term::differential(expand_var(t.operand(), name, body));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(expand_var(a, name, body));
      return Term::func_app(t.symbol(), std::move(args));
    }
  }
  return t;
}

HybridProgram expand_var(const HybridProgram& p, const Identifier& name,
                         const Term& body) {
  switch (p.kind()) {
    case ProgramKind::Test:
      return HybridProgram::test(expand_var(p.condition(), name, body));
    case ProgramKind::Assign:
      return HybridProgram::assign(p.var(), expand_var(p.value(), name, body));
    case ProgramKind::AssignAny:
      return p;
    case ProgramKind::ODESystem: {
      std::vector<OdeEquation> eqs;
      for (const auto& [lhs, rhs] : p.equations()) {
        eqs.emplace_back(lhs, expand_var(rhs, name, body));
      }
      return HybridProgram::ode(std::move(eqs), expand_var(p.domain(), name, body));
    }
    case ProgramKind::Choice:
      return HybridProgram::choice(expand_var(p.lhs(), name, body),
                                   expand_var(p.rhs(), name, body));
    case ProgramKind::Sequence:
      return HybridProgram::sequence(expand_var(p.lhs(), name, body),
                                     expand_var(p.rhs(), name, body));
    case ProgramKind::Loop:
      return HybridProgram::loop(expand_var(p.body(), name, body));
    case ProgramKind::IfThen:
      return HybridProgram::if_then(expand_var(p.condition(), name, body),
                                    expand_var(p.body(), name, body));
  }
  return p;
}

Formula expand_var(const Formula& f, const Identifier& name, const Term& body) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Compare:
      return Formula::compare(f.op(), expand_var(f.lhs_term(), name, body),
                              expand_var(f.rhs_term(), name, body));
    case FormulaKind::Not:
      return Formula::negation(expand_var(f.operand(), name, body));
    case FormulaKind::And:
      return Formula::conj(expand_var(f.lhs(), name, body),
                           expand_var(f.rhs(), name, body));
    case FormulaKind::Or:
      return Formula::disj(expand_var(f.lhs(), name, body),
                           expand_var(f.rhs(), name, body));
    case FormulaKind::Imply:
      return Formula::imply(expand_var(f.lhs(), name, body),
                            expand_var(f.rhs(), name, body));
    case FormulaKind::Equiv:
      return Formula::equiv(expand_var(f.lhs(), name, body),
                            expand_var(f.rhs(), name, body));
    case FormulaKind::Forall:
      return Formula::forall(f.binder(), expand_var(f.body(), name, body));
    case FormulaKind::Exists:
      return Formula::exists(f.binder(), expand_var(f.body(), name, body));
    case FormulaKind::Box:
      return Formula::box(expand_var(f.program(), name, body),
                          expand_var(f.post(), name, body));
    case FormulaKind::Diamond:
      return Formula::diamond(expand_var(f.program(), name, body),
                              expand_var(f.post(), name, body));
  }
  return f;
}

Formula expand_abbrevs(Formula f, const std::vector<TermAbbrev>& abbrevs) {
  for (const TermAbbrev& abbrev : abbrevs) {
    f = expand_var(f, abbrev.name, abbrev.body);
  }
  return f;
}

Term expand_abbrevs(Term t, const std::vector<TermAbbrev>& abbrevs) {
  for (const TermAbbrev& abbrev : abbrevs) {
    t = expand_var(t, abbrev.name, abbrev.body);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Parsing.

ImplicitDecl parse_implicit_decl(Parser& p) {
  ImplicitDecl decl;
  // implicit Real h1(Real t), h2(Real t) [']= {{init};{ode}};
  p.expect_word("Real");
  for (;;) {
    decl.names.push_back(p.expect_ident());
    p.expect(TokenKind::LParen);
    p.expect_word("Real");
    Identifier arg = p.expect_ident();
    if (p.at(TokenKind::Comma)) {
      p.fail("implicit functions take exactly one Real argument");
    }
    p.expect(TokenKind::RParen);
    if (decl.names.size() == 1) {
      decl.argument = arg;
    } else if (arg != decl.argument) {
      p.fail("all functions of one implicit declaration share the argument name");
    }
    if (!p.accept(TokenKind::Comma)) break;
    p.expect_word("Real");
  }
  p.accept(TokenKind::Prime);  // the '= spelling
  p.expect(TokenKind::EqOp);
  p.expect(TokenKind::LBrace);
  p.expect(TokenKind::LBrace);
  while (!p.at(TokenKind::RBrace)) {
    Identifier name = p.expect_ident();
    p.expect(TokenKind::AssignOp);
    Term value = p.term();
    decl.init_assignments.emplace_back(name, value);
    if (!p.accept(TokenKind::Semi)) break;
  }
  p.expect(TokenKind::RBrace);
  p.accept(TokenKind::Semi);
  p.expect(TokenKind::LBrace);
  for (;;) {
    Identifier lhs = p.expect_ident();
    p.expect(TokenKind::Prime);
    p.expect(TokenKind::EqOp);
    Term rhs = p.term();
    decl.ode.emplace_back(lhs, rhs);
    if (!p.accept(TokenKind::Comma)) break;
  }
  p.expect(TokenKind::RBrace);
  p.expect(TokenKind::RBrace);
  p.expect(TokenKind::Semi);
  return decl;
}

void parse_checks_block(Parser& p, ChecksBlock& checks) {
  while (!p.at_word("End")) {
    if (p.accept_word("config")) {
      for (;;) {
        Identifier key = p.expect_ident();
        p.expect(TokenKind::EqOp);
        checks.config.emplace_back(key, p.number());
        if (!p.accept(TokenKind::Comma)) break;
      }
      p.expect(TokenKind::Semi);
    } else if (p.accept_word("fix")) {
      Identifier name = p.expect_ident();
      p.expect(TokenKind::EqOp);
      checks.fixes.emplace_back(name, p.term());
      p.expect(TokenKind::Semi);
    } else if (p.accept_word("sample") || p.at_word("range")) {
      bool is_range = p.accept_word("range");
      SampleRange range;
      range.name = p.expect_ident();
      p.expect_word("in");
      p.expect(TokenKind::LBracket);
      range.lo = p.term();
      p.expect(TokenKind::Comma);
      range.hi = p.term();
      p.expect(TokenKind::RBracket);
      p.expect(TokenKind::Semi);
      (is_range ? checks.ranges : checks.samples).push_back(std::move(range));
    } else if (p.accept_word("init")) {
      Identifier name = p.expect_ident();
      p.expect(TokenKind::EqOp);
      checks.inits.emplace_back(name, p.term());
      p.expect(TokenKind::Semi);
    } else if (p.accept_word("monitor")) {
      p.expect_word("post");
      p.expect(TokenKind::Semi);
      checks.monitor_post = true;
    } else if (p.accept_word("invariant")) {
      CheckItem item;
      item.kind = CheckItem::Kind::Invariant;
      item.name = p.expect_ident();
      p.expect(TokenKind::Colon);
      item.formula = p.formula();
      p.expect(TokenKind::Semi);
      checks.items.push_back(std::move(item));
    } else if (p.accept_word("lie")) {
      CheckItem item;
      item.kind = CheckItem::Kind::Lie;
      item.name = p.expect_ident();
      p.expect(TokenKind::Colon);
      item.lhs = p.term();
      p.expect_word("expect");
      item.rhs = p.term();
      if (p.accept_word("tol")) item.tol = p.number();
      p.expect(TokenKind::Semi);
      checks.items.push_back(std::move(item));
    } else if (p.accept_word("identity")) {
      CheckItem item;
      item.kind = CheckItem::Kind::Identity;
      item.name = p.expect_ident();
      p.expect(TokenKind::Colon);
      item.lhs = p.term();
      p.expect(TokenKind::Tilde);
      item.rhs = p.term();
      for (;;) {
        if (p.accept_word("abs")) {
          item.abs_tol = p.number();
        } else if (p.accept_word("rel")) {
          item.rel_tol = p.number();
        } else if (p.accept_word("on")) {
          GridSpec grid;
          grid.var = p.expect_ident();
          p.expect_word("in");
          p.expect(TokenKind::LBracket);
          grid.lo = p.term();
          p.expect(TokenKind::Comma);
          grid.hi = p.term();
          p.expect(TokenKind::RBracket);
          p.expect_word("points");
          grid.points = p.number().num().convert_to<long>();
          item.grid = std::move(grid);
        } else {
          break;
        }
      }
      p.expect(TokenKind::Semi);
      checks.items.push_back(std::move(item));
    } else {
      p.fail("expected a Checks item",
             {"config", "fix", "sample", "range", "init", "monitor", "invariant",
              "lie", "identity", "End"});
    }
  }
}

void check_declared(const std::set<Identifier>& declared, const Formula& f,
                    const std::string& where) {
  for (const Identifier& v : free_variables(f)) {
    if (!declared.count(v)) {
      throw DeclarationError(v + " (in " + where + ")");
    }
  }
}

void check_declared(const std::set<Identifier>& declared, const Term& t,
                    const std::string& where) {
  for (const Identifier& v : free_variables(t)) {
    if (!declared.count(v)) {
      throw DeclarationError(v + " (in " + where + ")");
    }
  }
}

}  // namespace

ParsedModel parse_model(const std::string& text) {
  Registry registry = Registry::builtins();
  Parser p(tokenize(text), registry.symbols());

  ModelFile model;

  p.expect_word("Definitions");
  while (!p.at_word("End")) {
    if (p.accept_word("implicit")) {
      ImplicitDecl decl = parse_implicit_decl(p);
      registry.register_implicit(decl);
      for (const InterpretedSymbol& sym : desugar_implicit(decl)) {
        p.add_symbol(registry.at(sym.name()).symbol);
      }
      model.implicits.push_back(std::move(decl));
    } else if (p.accept_word("Real")) {
      Identifier first = p.expect_ident();
      if (p.accept(TokenKind::EqOp)) {
        TermAbbrev abbrev;
        abbrev.name = first;
        abbrev.body = p.term();
        p.expect(TokenKind::Semi);
        model.abbreviations.push_back(std::move(abbrev));
      } else {
        model.constants.push_back(first);
        while (p.accept(TokenKind::Comma)) {
          model.constants.push_back(p.expect_ident());
        }
        p.expect(TokenKind::Semi);
      }
    } else {
      p.fail("expected a definition", {"implicit", "Real", "End"});
    }
  }
  p.expect_word("End");
  p.expect(TokenKind::Dot);

  if (p.accept_word("ProgramVariables")) {
    while (!p.at_word("End")) {
      p.expect_word("Real");
      model.program_variables.push_back(p.expect_ident());
      while (p.accept(TokenKind::Comma)) {
        model.program_variables.push_back(p.expect_ident());
      }
      p.expect(TokenKind::Semi);
    }
    p.expect_word("End");
    p.expect(TokenKind::Dot);
  }

  p.expect_word("Problem");
  Formula problem = p.formula();
  p.expect_word("End");
  p.expect(TokenKind::Dot);

  if (p.accept_word("Checks")) {
    ChecksBlock checks;
    parse_checks_block(p, checks);
    p.expect_word("End");
    p.expect(TokenKind::Dot);
    model.checks = std::move(checks);
  }

  if (!p.at(TokenKind::EndOfInput)) {
    p.fail("trailing input after the final End.");
  }

  // Abbreviation expansion (earlier abbreviations visible to later ones).
  for (size_t i = 0; i < model.abbreviations.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      model.abbreviations[i].body = expand_var(
          model.abbreviations[i].body, model.abbreviations[j].name,
          model.abbreviations[j].body);
    }
  }
  model.problem = expand_abbrevs(problem, model.abbreviations);
  if (model.checks) {
    for (auto& [name, term] : model.checks->fixes) {
      term = expand_abbrevs(term, model.abbreviations);
    }
    for (auto& [name, term] : model.checks->inits) {
      term = expand_abbrevs(term, model.abbreviations);
    }
    for (CheckItem& item : model.checks->items) {
      item.formula = expand_abbrevs(item.formula, model.abbreviations);
      item.lhs = expand_abbrevs(item.lhs, model.abbreviations);
      item.rhs = expand_abbrevs(item.rhs, model.abbreviations);
    }
  }

  // Declaration checking.
  std::set<Identifier> declared(model.constants.begin(), model.constants.end());
  for (const Identifier& v : model.program_variables) {
    if (!declared.insert(v).second) {
      throw DeclarationError(v + " declared twice");
    }
  }
  for (const ImplicitDecl& decl : model.implicits) {
    for (const Identifier& name : decl.names) {
      if (declared.count(name)) {
        throw DeclarationError("implicit function " + name +
                               " collides with a declared identifier");
      }
    }
  }
  std::set<Identifier> abbrev_scope = declared;
  for (const TermAbbrev& abbrev : model.abbreviations) {
    check_declared(abbrev_scope, abbrev.body, "abbreviation " + abbrev.name);
  }
  check_declared(declared, model.problem, "Problem");
  if (model.checks) {
    std::set<Identifier> constants(model.constants.begin(), model.constants.end());
    for (const auto& [name, term] : model.checks->fixes) {
      if (!constants.count(name)) throw DeclarationError(name + " (fix)");
      check_declared(constants, term, "fix " + name);
    }
    for (const SampleRange& s : model.checks->samples) {
      if (!constants.count(s.name)) throw DeclarationError(s.name + " (sample)");
      check_declared(constants, s.lo, "sample " + s.name);
      check_declared(constants, s.hi, "sample " + s.name);
    }
    std::set<Identifier> vars(model.program_variables.begin(),
                              model.program_variables.end());
    for (const auto& [name, term] : model.checks->inits) {
      if (!vars.count(name)) throw DeclarationError(name + " (init)");
      check_declared(constants, term, "init " + name);
    }
    for (const SampleRange& r : model.checks->ranges) {
      if (!vars.count(r.name)) throw DeclarationError(r.name + " (range)");
    }
    for (const CheckItem& item : model.checks->items) {
      std::set<Identifier> scope = declared;
      if (item.grid) scope.insert(item.grid->var);
      check_declared(scope, item.formula, "check " + item.name);
      check_declared(scope, item.lhs, "check " + item.name);
      check_declared(scope, item.rhs, "check " + item.name);
    }
  }

  ParsedModel parsed;
  parsed.model = std::move(model);
  parsed.registry = std::move(registry);
  return parsed;
}

// ---------------------------------------------------------------------------
// Printing.

namespace {

std::string print_implicit(const ImplicitDecl& decl) {
  std::ostringstream out;
  out << "implicit ";
  for (size_t i = 0; i < decl.names.size(); ++i) {
    if (i > 0) out << ", ";
    out << "Real " << decl.names[i] << "(Real " << decl.argument << ")";
  }
  out << " '= {{";
  for (const auto& [name, value] : decl.init_assignments) {
    out << name << ":=" << print(value) << ";";
  }
  out << "}; {";
  bool first = true;
  for (const auto& [lhs, rhs] : decl.ode) {
    if (!first) out << ", ";
    first = false;
    out << lhs << "'=" << print(rhs);
  }
  out << "}};";
  return out.str();
}

std::string rational_text(const Rational& r) { return r.to_string(); }

}  // namespace

std::string print_model(const ModelFile& model) {
  std::ostringstream out;
  out << "Definitions\n";
  if (!model.constants.empty()) {
    out << "  Real ";
    for (size_t i = 0; i < model.constants.size(); ++i) {
      if (i > 0) out << ", ";
      out << model.constants[i];
    }
    out << ";\n";
  }
  for (const ImplicitDecl& decl : model.implicits) {
    out << "  " << print_implicit(decl) << "\n";
  }
  for (const TermAbbrev& abbrev : model.abbreviations) {
    out << "  Real " << abbrev.name << " = " << print(abbrev.body) << ";\n";
  }
  out << "End.\n\n";

  if (!model.program_variables.empty()) {
    out << "ProgramVariables\n  Real ";
    for (size_t i = 0; i < model.program_variables.size(); ++i) {
      if (i > 0) out << ", ";
      out << model.program_variables[i];
    }
    out << ";\nEnd.\n\n";
  }

  out << "Problem\n  " << print(model.problem) << "\nEnd.\n";

  if (model.checks) {
    const ChecksBlock& checks = *model.checks;
    out << "\nChecks\n";
    for (const auto& [key, value] : checks.config) {
      out << "  config " << key << " = " << rational_text(value) << ";\n";
    }
    for (const auto& [name, term] : checks.fixes) {
      out << "  fix " << name << " = " << print(term) << ";\n";
    }
    for (const SampleRange& s : checks.samples) {
      out << "  sample " << s.name << " in [" << print(s.lo) << ", " << print(s.hi)
          << "];\n";
    }
    for (const auto& [name, term] : checks.inits) {
      out << "  init " << name << " = " << print(term) << ";\n";
    }
    for (const SampleRange& r : checks.ranges) {
      out << "  range " << r.name << " in [" << print(r.lo) << ", " << print(r.hi)
          << "];\n";
    }
    if (checks.monitor_post) out << "  monitor post;\n";
    for (const CheckItem& item : checks.items) {
      switch (item.kind) {
        case CheckItem::Kind::Invariant:
          out << "  invariant " << item.name << " : " << print(item.formula) << ";\n";
          break;
        case CheckItem::Kind::Lie:
          out << "  lie " << item.name << " : " << print(item.lhs) << " expect "
              << print(item.rhs) << " tol " << rational_text(item.tol) << ";\n";
          break;
        case CheckItem::Kind::Identity:
          out << "  identity " << item.name << " : " << print(item.lhs) << " ~ "
              << print(item.rhs) << " abs " << rational_text(item.abs_tol);
          if (!item.rel_tol.is_zero()) {
            out << " rel " << rational_text(item.rel_tol);
          }
          if (item.grid) {
            out << " on " << item.grid->var << " in [" << print(item.grid->lo) << ", "
                << print(item.grid->hi) << "] points " << item.grid->points;
          }
          out << ";\n";
          break;
      }
    }
    out << "End.\n";
  }
  return out.str();
}

std::optional<ProblemShape> split_problem(const Formula& problem) {
  ProblemShape shape;
  const Formula* cursor = &problem;
  while (cursor->kind() == FormulaKind::Imply) {
    shape.assumptions.push_back(cursor->lhs());
    cursor = &cursor->rhs();
  }
  if (cursor->kind() != FormulaKind::Box) return std::nullopt;
  shape.program = cursor->program();
  shape.postcondition = cursor->post();
  return shape;
}

}  // namespace dlimp
