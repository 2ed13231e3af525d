#include "dlimp/diff.hpp"

#include "dlimp/errors.hpp"

namespace dlimp {

namespace {

/// rhs_i with coordinate x_j -> h_j(argument), time_var -> argument.
Term instantiate_rhs(const DefinedFamily& family, int index, const Term& argument,
                     const Registry& registry) {
  Substitution sigma;
  for (size_t j = 0; j < family.names.size(); ++j) {
    const RegistryEntry* entry = registry.lookup(family.names[j]);
    if (!entry) {
      throw UnregisteredCoordinate("family coordinate " + family.names[j] +
                                   " is not a registered symbol");
    }
    sigma.emplace(family.names[j], Term::func_app(entry->symbol, {argument}));
  }
  sigma.emplace(family.time_var, argument);
  return substitute(family.rhs[index], sigma);
}

}  // namespace

Term family_rhs_in_functions(const DefinedFamily& family, int index,
                             const Term& argument, const Registry& registry) {
  return instantiate_rhs(family, index, argument, registry);
}

Term differential(const Term& term, const Registry& registry) {
  switch (term.kind()) {
    case TermKind::Variable:
      return Term::differential(term);
    case TermKind::Rational:
      return Term::rational(0);
    case TermKind::Plus:
      return Term::plus(differential(term.lhs(), registry),
                        differential(term.rhs(), registry));
    case TermKind::Times:
      // (a*b)' = a'*b + a*b'
      return Term::plus(
          Term::times(differential(term.lhs(), registry), term.rhs()),
          Term::times(term.lhs(), differential(term.rhs(), registry)));
    case TermKind::Divide:
      // (a/b)' = (a'*b - a*b') / b^2
      return Term::divide(
          Term::plus(Term::times(differential(term.lhs(), registry), term.rhs()),
                     Term::negate(Term::times(term.lhs(),
                                              differential(term.rhs(), registry)))),
          Term::times(term.rhs(), term.rhs()));
    case TermKind::Negate:
      return Term::negate(differential(term.operand(), registry));
    case TermKind::Differential:
      throw MissingAxiom("no differential rule for nested differentials");
    case TermKind::FuncApp: {
      const InterpretedSymbol& sym = term.symbol();
      if (sym.arity() == 0) return Term::rational(0);  // pi() and other constants
      const RegistryEntry* entry = registry.lookup(sym.name());
      if (!entry || !entry->family) {
        throw MissingAxiom("symbol " + sym.name() + " has no differential axiom");
      }
      const Term& argument = term.args()[0];
      Term outer = instantiate_rhs(*entry->family, entry->index, argument, registry);
      return Term::times(outer, differential(argument, registry));
    }
  }
  throw Error("unreachable term kind");
}

Term substitute_differentials(const Term& term,
                              const std::map<Identifier, Term>& derivatives) {
  switch (term.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return term;
    case TermKind::Differential: {
      const Term& inner = term.operand();
      if (inner.kind() != TermKind::Variable) {
        throw EvalError("cannot resolve differential of a non-variable term");
      }
      auto it = derivatives.find(inner.var_name());
      return it == derivatives.end() ? Term::rational(0) : it->second;
    }
    case TermKind::Plus:
      return Term::plus(substitute_differentials(term.lhs(), derivatives),
                        substitute_differentials(term.rhs(), derivatives));
    case TermKind::Times:
      return Term::times(substitute_differentials(term.lhs(), derivatives),
                         substitute_differentials(term.rhs(), derivatives));
    case TermKind::Divide:
      return Term::divide(substitute_differentials(term.lhs(), derivatives),
                          substitute_differentials(term.rhs(), derivatives));
    case TermKind::Negate:
      return Term::negate(substitute_differentials(term.operand(), derivatives));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      for (const Term& a : term.args()) {
        args.push_back(substitute_differentials(a, derivatives));
      }
      return Term::func_app(term.symbol(), std::move(args));
    }
  }
  return term;
}

}  // namespace dlimp
