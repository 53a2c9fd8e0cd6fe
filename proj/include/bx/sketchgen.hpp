#pragma once

// Sketch generation: candidate bidirectional type signatures and
// type-directed program sketches derived from the unidirectional input.
//
// Pipeline:
//   genType    — all rewrites of a type that wrap BX around first-order
//                sub-components (identity included at cost 0).
//   genEnv     — candidate re-typings of the entry-reachable definitions,
//                pruned to those under which the entry expression checks at
//                BX sigma1 -> BX tau1.
//   genSketch  — translate one definition body: unidirectional case may
//                become bx-case (leaving exit/reconciliation holes),
//                constructors may become bx-constructors, sub-terms may be
//                lifted; every completed sketch typechecks at its target.
//
// Alternatives that demand a BX target try the bidirectional construct
// before the unidirectional one; lift carries a higher weight than direct
// bidirectionalization.

#include "bx/config.hpp"
#include "bx/search.hpp"
#include "bx/syntax.hpp"

namespace bx {

// All types reachable from `a` by wrapping BX around first-order
// sub-components; cost = number of wrappers inserted (times weights.bx).
SearchStream<TypePtr> genType(const TypePtr& a, const Weights& w);

// Count of distinct rewrites genType emits (used as a completeness oracle).
long genTypeCount(const TypePtr& a);

struct EnvCandidate {
  std::map<std::string, TypePtr> env;  // full typing env, definitions re-typed
  TypePtr entryType;                   // BX sigma1 -> BX tau1
};

// Definitions reachable from the entry expression, in declaration order.
// Only these are re-typed and sketched; the rest stay unidirectional
// components.
std::vector<std::string> reachableDefs(const SynthesisInput& in);

// Candidate environments under which the entry expression typechecks at
// BX sigma1 -> BX tau1 (sigma1 -> tau1 being the entry's original type).
SearchStream<EnvCandidate> genEnv(const SynthesisInput& in, const Weights& w);

// Type-directed sketch stream for one expression: target/source as in the
// generation relation; gammaP/deltaP are the bidirectional-program
// environments, gamma the original one. Hole ids are drawn from *holeIds.
SearchStream<ExprPtr> genSketch(const DataDeclTable& datatypes,
                                const std::map<std::string, TypePtr>& gammaP,
                                const std::map<std::string, TypePtr>& deltaP,
                                const TypePtr& target,
                                const std::map<std::string, TypePtr>& gamma,
                                const ExprPtr& e, const TypePtr& source,
                                const Weights& w,
                                const std::shared_ptr<int>& holeIds);

struct ProgramSketch {
  std::map<std::string, TypePtr> env;  // candidate typing env
  TypePtr entryType;
  std::vector<Definition> defs;  // full program; reachable bodies sketched
};

// Whole-program sketches: for each environment candidate, the product of
// per-definition sketch streams over the entry-reachable definitions.
SearchStream<ProgramSketch> genProgramSketches(const SynthesisInput& in,
                                               const Weights& w);

// Replace every hole by a canonical minimal well-typed term (exit: constant
// True; reconciliation: \s.\v.s; otherwise a minimal inhabitant is not
// attempted and the hole is left in place). Used by typecheck oracles.
ExprPtr canonicalFill(const ExprPtr& e);

}  // namespace bx
