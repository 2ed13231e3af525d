#pragma once

#include <memory>
#include <optional>
#include <string>

#include "dlimp/definitions.hpp"

namespace dlimp {

enum class ExistenceMethod { AffineODE, UnivariateBoundedInvariant, UserAssumed };

const char* existence_method_name(ExistenceMethod method);

/// Why the defining ODE's solutions exist globally. UserAssumed certificates
/// are only constructible in unsound (--assume-existence) mode and taint
/// everything derived from them.
class ExistenceCertificate {
 public:
  ExistenceCertificate(DefinedFamily family, ExistenceMethod method,
                       std::string evidence)
      : family_(std::move(family)), method_(method), evidence_(std::move(evidence)) {}

  const DefinedFamily& family() const { return family_; }
  ExistenceMethod method() const { return method_; }
  const std::string& evidence() const { return evidence_; }
  bool assumed() const { return method_ == ExistenceMethod::UserAssumed; }

 private:
  DefinedFamily family_;
  ExistenceMethod method_;
  std::string evidence_;
};

struct ExistenceOutcome {
  std::optional<ExistenceCertificate> certificate;
  std::string reason;  // set when unproven
};

/// Decides the Lemma-2 side condition for the two automated classes:
///  - AffineODE: every coordinate RHS linear in the family coordinates with
///    time-independent exact coefficients;
///  - UnivariateBoundedInvariant: n = 1, autonomous polynomial RHS, and exact
///    rational equilibria a < X < b bracketing the initial value (solutions
///    are trapped in (a,b) in both time directions).
/// Anything else is refused.
ExistenceOutcome check_existence(const DefinedFamily& family);

struct KernelOptions {
  bool assume_existence = false;
};

/// Requires options.assume_existence; produces a tainted certificate.
ExistenceCertificate make_assumed_certificate(const DefinedFamily& family,
                                              const KernelOptions& options);

/// Fills certificates (or refusal reasons) for every family-backed entry.
void certify_registry(Registry& registry, const KernelOptions& options = {});

/// An instance of the FI axiom: (e0 = h(e1,...,ek)) <-> phi(e0, e1,...,ek).
struct FIInstance {
  InterpretedSymbol symbol = InterpretedSymbol::numeric_builtin("?", 0);
  Term output_term = Term::rational(0);
  std::vector<Term> input_terms;
  Formula equivalence = Formula::truth(true);
  bool assumed = false;
};

/// Builds the FI instance for a certified symbol, alpha-renaming the
/// interpretation's bound variables as needed for admissible substitution.
/// Throws NoCertificateError (missing/refused certificate or numeric-only
/// symbol) or ArityError.
FIInstance instantiate_FI(const Registry& registry, const Identifier& symbol,
                          const Term& output_term, const std::vector<Term>& input_terms);

/// Replaces the ordinal-th occurrence (pre-order) of a `symbol` application in
/// `formula` with a fresh variable and conjoins/guards the instantiated
/// interpretation at top level:
///   even polarity:  exists z (phi(z, e) & formula[occ := z])
///   odd polarity:   forall z (phi(z, e) -> formula[occ := z])
/// Throws PositionError when the occurrence does not exist or sits under a
/// modality, an equivalence, or a binder capturing the argument.
Formula expand_occurrence(const Registry& registry, const Formula& formula,
                          const Identifier& symbol, int ordinal = 0);

}  // namespace dlimp
