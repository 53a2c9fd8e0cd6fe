#pragma once

// Completion of exit-condition and reconciliation holes.
//
// An exit-condition hole for a branch `p -> e` is partially completed to
//
//     \v -> case v of { P(e) -> [generic Bool hole] ; _ -> False }
//
// and a reconciliation hole to
//
//     \s -> \v -> case v of { P(e) -> [hole restricted to the shape p] }
//
// where P(e) is the "obvious shape" of the branch body e: constructor
// applications keep their head and recurse into the arguments, everything
// else becomes a fresh variable. The remaining holes are then filled by the
// enumerators below: Bool holes by disjunctive-normal-form formulas over
// atomic propositions `x V1 ... Vn`, shape-restricted holes by beta-normal,
// eta-long terms whose case-free leaves agree with the required shape.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bx/config.hpp"
#include "bx/search.hpp"
#include "bx/syntax.hpp"

namespace bx {

// ---------------------------------------------------------------------------
// Shape patterns
// ---------------------------------------------------------------------------

// P(e): constructor spines (both ordinary and bidirectional constructors)
// are kept; lifts are transparent; any other subexpression becomes a fresh
// variable. Fresh names are drawn with `freshVar` against `avoid`, which is
// extended with every name handed out, so the result is linear and the names
// survive printing and re-parsing.
PatPtr shapePattern(const ExprPtr& e, std::set<std::string>& avoid);

// A pattern without variables, turned back into the expression it matches.
ExprPtr patternToExpr(const PatPtr& p);

// Do two patterns match at least one common value? (Variables match
// anything.) Used for the all-exits-True heuristic.
bool patternsOverlap(const PatPtr& a, const PatPtr& b);
bool patternsPairwiseDisjoint(const std::vector<PatPtr>& ps);

// ---------------------------------------------------------------------------
// Partial completion
// ---------------------------------------------------------------------------

// Exit hole for branch body e at type sigma -> Bool. Produces
//   \v -> case v of { P(e) -> hole ; _ -> False }
// where the inner hole is a Generic hole at type Bool whose environment
// extends h.envUni with v and the variables of P(e). The catch-all arm is
// omitted when P(e) is a bare variable (it would be unreachable). `nextId`
// numbers the holes introduced.
ExprPtr completeExitHole(const DataDeclTable& dt, const HoleInfo& h, int& nextId);

// Reconciliation hole for branch `p -> e` at type sigma0 -> sigma -> sigma0.
// Produces
//   \s -> \v -> case v of { P(e) -> hole }
// where the inner hole is a Shape hole at type sigma0 restricted to p, seeing
// h.envUni plus s, v and the variables of P(e). When p has no variables the
// completion is deterministic: \s -> \v -> p, with no hole left.
ExprPtr completeReconHole(const DataDeclTable& dt, const HoleInfo& h, int& nextId);

// Heuristic candidates for branches that need no search: the constant-True
// exit condition \v -> True and the keep-the-source reconciliation
// \s -> \v -> s. Used for single-branch bidirectional cases and, for the
// exit conditions, whenever the shapes P(e_i) of all branches are pairwise
// disjoint.
ExprPtr exitAlwaysTrue();
ExprPtr reconKeepSource();

// ---------------------------------------------------------------------------
// Term enumeration
// ---------------------------------------------------------------------------

// Terms of type t whose case-free leaves follow `shape`, ordered by cost.
//
//   U ::= V | case x V1 ... Vn of { Ci xs -> U }   (cases only at the top,
//                                                   under lambdas and in
//                                                   branch bodies)
//   V ::= \x -> U                                  (only at function types)
//       | x V1 ... Vn                              (x from env, applied fully)
//       | C V1 ... Vn                              (heads follow the shape)
//
// At a constructor-headed shape the only leaves are that constructor (with
// arguments shaped by the sub-patterns) and variables whose matched pattern
// -- learned from an enclosing case arm over that variable -- refines the
// shape; `case s of { a:x -> s }` is the canonical example. Environment
// entries of bidirectional type `BX tau` are usable at tau (exit conditions
// and reconciliation functions run on underlying values); entries whose type
// mentions BX anywhere else are not usable in this unidirectional setting.
// Case scrutinees are applications `x V1 ... Vn` whose datatype result is
// read off x's signature; branch sets range over the non-empty subsets of
// the datatype's constructors, and arms always bind constructor patterns
// (never a bare variable, so no degenerate `case v of { z -> ... }` is ever
// produced). `caseDepth` bounds case nesting.
SearchStream<ExprPtr> enumerateShaped(const DataDeclTable& dt,
                                      const std::map<std::string, TypePtr>& env,
                                      const PatPtr& shape, const TypePtr& t, const Weights& w,
                                      int caseDepth);

// Bool-typed formulas in disjunctive normal form: the constants True and
// False (in that order) followed by ORs of ANDs of possibly negated atoms
// `x V1 ... Vn`, where the heads x and their signatures come from `atoms`
// and the argument terms are drawn from `env` by the shaped enumerator.
// Negation uses `not`, conjunction `and`, disjunction `or`; each connective
// is emitted only when env binds that prelude name at its Bool type. At most
// `maxAtoms` atoms appear in a formula. Distributivity, associativity and
// unit/zero redundancy are absent by construction; commutative and
// idempotent variants are deliberately not deduplicated.
SearchStream<ExprPtr> enumerateBoolDNF(const DataDeclTable& dt,
                                       const std::map<std::string, TypePtr>& env,
                                       const std::map<std::string, TypePtr>& atoms,
                                       const Weights& w, int maxAtoms);

// The environment as the enumerators see it: BX tau entries become tau,
// entries whose type still mentions BX are dropped.
std::map<std::string, TypePtr> enumerationEnv(const std::map<std::string, TypePtr>& envUni);

// Atom heads for exit-condition holes: entries of `env` (already through
// enumerationEnv) whose type is A1 -> ... -> An -> Bool with every Ai free of
// BX, excluding the logical connectives themselves.
std::map<std::string, TypePtr> boolAtomHeads(const std::map<std::string, TypePtr>& env);

}  // namespace bx
