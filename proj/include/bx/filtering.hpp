#pragma once

// Trace-guided filtering of synthesis candidates.
//
// Per candidate program and example, the pipeline is:
//   1. residualize the entry once (CandidateContext) — the evaluator that
//      produced a residual must also run every traced descent over it;
//   2. computeGetTrace: traced get on the updated source. The branch trace
//      is the guide every backward run must follow; taken branches whose
//      exit conditions are unfilled holes yield positive constraints.
//   3. testReconCandidates: guided put of the updated view. Branch decisions
//      are recorded as BranchEvents; holed exit conditions defer into
//      ExitHoleEvents (positive for the taken branch, negative for a
//      switched-away original). Pass iff the rebuilt source is exactly the
//      example's updated source.
//   4. extractExitConstraints: deferred checks, deduplicated, as concrete
//      requirements on hole bodies.
//   5. solveExitHoles: assignments of candidate expressions to exit holes
//      satisfying every constraint, cheapest first.
//   6. finalCheck: untraced whole-program acceptance on all examples.
//
// Exit-hole solving consults only the constraints — reconciliation bodies
// influence it solely through the branch decisions that produced the
// constraint set, never directly.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bx/bx_eval.hpp"
#include "bx/search.hpp"
#include "bx/sketchgen.hpp"
#include "bx/syntax.hpp"

namespace bx {

// A concrete requirement on an unfilled exit-condition hole: under these
// first-order bindings the hole body must evaluate to `expected`. The
// binding environment covers every free variable of the hole body (the
// case-arm pattern variables, the surrounding definition's parameters, and
// the view variable of the completed exit condition).
struct ExitConstraint {
  int holeId = -1;
  ValueEnv bindingEnv;
  bool expected = true;
};

// Diagnostic line formats, consumed by the driver's trace dump:
//   BR site=<id> taken=<j> orig=<i>     (orig=- when no branch matched)
//   CONSTR hole=<id> expect=<b> env={..}
std::string showBranchEvent(const BranchEvent& ev);
std::string showExitConstraint(const ExitConstraint& c);

// One candidate program under test: a single evaluator owns residualization
// and every traced run over the residual, so pattern-variable freshening
// stays globally consistent. Construction throws EntryTypeError when the
// entry does not evaluate to a bidirectional value.
struct CandidateContext {
  Evaluator ev;
  ResPtr res;
  std::string srcVar;

  CandidateContext(const std::vector<Definition>& program, const ExprPtr& entry);
};

// --------------------------------------------------------------------------
// Trace computation (forward, on the updated source)
// --------------------------------------------------------------------------

struct GetTraceResult {
  bool ok = false;
  std::string reason;  // set when !ok (no branch matched, stuck, ...)
  FOPtr value;         // get output on the updated source
  TracePtr trace;
  std::vector<ExitHoleEvent> holeEvents;  // positive, from taken branches
};

// Traced get with the source bound to the updated source s'. A backward run
// that produces s' must choose exactly these branches, so the trace guides
// every subsequent put. Exit conditions that bottom out in holes are
// recorded instead of checked.
GetTraceResult computeGetTrace(CandidateContext& cx, const FOPtr& sPrime);

// --------------------------------------------------------------------------
// Reconciliation testing (backward, guided)
// --------------------------------------------------------------------------

struct ReconTestResult {
  bool pass = false;
  std::string reason;  // set when !pass
  FOPtr rebuiltSource;
  std::vector<BranchEvent> events;
  std::vector<ExitHoleEvent> holeEvents;  // positive and negative
};

// Guided put of the example's updated view along `guide`. Reconciliation
// slots must be filled; exit-condition holes may remain and defer. Pass iff
// the rebuilt source equals the example's updated source; reconciliation
// pattern mismatches, merge conflicts and trace mismatches fail.
ReconTestResult testReconCandidates(CandidateContext& cx, const Example& ex,
                                    const TracePtr& guide);

// --------------------------------------------------------------------------
// Exit-condition constraints
// --------------------------------------------------------------------------

// Deferred exit checks of passing runs, as concrete constraints. Order of
// first occurrence is kept; exact duplicates (same hole, expectation and
// bindings) collapse.
std::vector<ExitConstraint> extractExitConstraints(const std::vector<ExitHoleEvent>& events);

// Assignments hole id -> expression satisfying every constraint, cost =
// sum of member costs, cheapest first. Candidate makers are consulted
// lazily; a hole with no constraints contributes only its single cheapest
// candidate. A candidate whose evaluation under a constraint environment
// errors does not satisfy the constraint. Holes that have constraints but
// no maker yield an empty stream.
using ExitAssignment = std::map<int, ExprPtr>;
SearchStream<ExitAssignment> solveExitHoles(
    const std::vector<Definition>& program, const std::vector<ExitConstraint>& constraints,
    const std::map<int, std::function<SearchStream<ExprPtr>()>>& candidates);

// Evaluate one hole body under one constraint environment (used by the
// solver and by its verification oracle). Errors map to nullopt.
std::optional<bool> evalExitCandidate(const std::vector<Definition>& program, const ExprPtr& body,
                                      const ValueEnv& env);

// --------------------------------------------------------------------------
// Final whole-program check
// --------------------------------------------------------------------------

struct FinalCheckResult {
  bool accepted = false;
  std::string reason;  // set when rejected: example index and failed property
};

// Untraced acceptance of a hole-free candidate: for every example,
//   put s v' = s',   get s = the original unidirectional output on s,
//   get s' = v'.
FinalCheckResult finalCheck(const SynthesisInput& in, const ProgramSketch& candidate);

}  // namespace bx
