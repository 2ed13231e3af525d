#pragma once

#include "dlimp/definitions.hpp"

namespace dlimp {

/// Symbolic differential of a term. Variables become Differential nodes;
/// family-backed applications h_i(e) expand through their defining ODE:
/// rhs_i with coordinates replaced by h_j(e) and the time variable by e,
/// multiplied by (e)'. Throws MissingAxiom for symbols without a defining
/// family (sqrt) and for Differential-of-Differential.
Term differential(const Term& term, const Registry& registry);

/// Substitutes Differential(Variable v) leaves: ODE-bound variables get their
/// right-hand sides, everything else differentiates to zero.
Term substitute_differentials(const Term& term,
                              const std::map<Identifier, Term>& derivatives);

/// rhs_index of the family re-expressed in function applications: coordinate
/// x_j becomes h_j(argument), the time variable becomes argument. Throws
/// UnregisteredCoordinate when a family member has no registered symbol.
Term family_rhs_in_functions(const DefinedFamily& family, int index,
                             const Term& argument, const Registry& registry);

}  // namespace dlimp
