#pragma once

#include <vector>

#include "dlimp/oracle.hpp"

namespace dlimp {

enum class FactKind { InitialValue, DifferentialAxiom, UnfoldBase, UnfoldStep, Abstracted };
enum class Verdict { Pass, Fail, Unknown, NotChecked };

const char* fact_kind_name(FactKind kind);
const char* verdict_name(Verdict verdict);

/// A named formula with provenance and (optionally) a numeric verdict.
struct Fact {
  Identifier name;
  FactKind kind = FactKind::InitialValue;
  Formula statement = Formula::truth(true);
  std::string provenance;
  bool assumed = false;  // derived from a UserAssumed certificate
  Verdict verdict = Verdict::NotChecked;
  std::string detail;
};

/// h_i(T) = X_i, numerically confirmed to 1e-9. Throws NoCertificateError
/// when the symbol's family lacks a certificate.
Fact initial_value_lemma(const Registry& registry, Oracle& oracle,
                         const Identifier& symbol);

/// (h_i(e))' = f_i(h_1(e),...,h_n(e), e) * (e)'. Verdict from central finite
/// differences at 100 points over [-5, 5] with step 1e-4 and tolerance 1e-5.
Fact differential_axiom(const Registry& registry, Oracle& oracle,
                        const Identifier& symbol);

/// Differential unfolding of goal P(x) at pivot x from closed base v0:
///   UnfoldBase:  P(v0)                       (constants folded)
///   UnfoldStep:  P(v) -> [{v'=1 & v<=x} ++ {v'=-1 & v>=x}] P(v), v fresh
/// Numeric verdicts are established by the callers that simulate the step.
std::pair<Fact, Fact> differential_unfold(const Formula& goal, const Identifier& pivot,
                                          const Term& base);

/// Replaces each syntactically distinct target application with a fresh
/// variable and prepends the translated bounds as hypotheses. Fresh names:
/// first character of the symbol, disambiguated by a free identifier of the
/// argument when several targets share a symbol.
Fact abstract_functions(const Formula& goal, const std::vector<Term>& targets,
                        const std::vector<Fact>& bounds);

/// Deterministic fresh-name assignment used by abstract_functions, exposed
/// for the back-substitution property: fresh variable -> target application.
Substitution abstraction_back_substitution(const Formula& goal,
                                           const std::vector<Term>& targets,
                                           const std::vector<Fact>& bounds);

}  // namespace dlimp
