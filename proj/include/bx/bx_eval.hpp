#pragma once

// Bidirectional semantics: pattern semantics, the environment algebra, and
// traced get/put over residual expressions. Untraced put drives the REPL and
// final candidate checking; guided put (branch choice dictated by a trace)
// drives synthesis filtering.
//
// Invariant: a residual expression must be descended with the same Evaluator
// that produced it — pattern-variable freshening draws on the evaluator's
// name supply, and reusing one evaluator keeps all names globally distinct.

#include <functional>
#include <optional>
#include <set>
#include <utility>

#include "bx/eval.hpp"
#include "bx/syntax.hpp"

namespace bx {

struct MissingBinding : BxError {
  std::string name;
  explicit MissingBinding(const std::string& n) : BxError("unbound variable " + n), name(n) {}
};
struct MergeConflict : BxError {
  std::string name;
  FOPtr left, right;
  MergeConflict(const std::string& n, FOPtr a, FOPtr b)
      : BxError("inconsistent backward update for " + n + ": " + showFO(a) + " vs " + showFO(b)),
        name(n),
        left(std::move(a)),
        right(std::move(b)) {}
};
struct DomainViolation : BxError {
  using BxError::BxError;
};
// Get-side: the taken branch's exit condition evaluated to False.
struct ExitAssertionFailed : BxError {
  int branch;
  FOPtr view;
  ExitAssertionFailed(int b, FOPtr u)
      : BxError("exit condition of branch " + std::to_string(b) + " rejects view " + showFO(u)),
        branch(b),
        view(std::move(u)) {}
};
struct NoBranchMatches : BxError {
  using BxError::BxError;
};
struct LiftMismatch : BxError {
  FOPtr expected, got;
  LiftMismatch(FOPtr e, FOPtr g)
      : BxError("lifted constant " + showFO(e) + " cannot be updated to " + showFO(g)),
        expected(std::move(e)),
        got(std::move(g)) {}
};
// The updated view disagrees with a bidirectional constructor's head.
struct PutConMismatch : BxError {
  using BxError::BxError;
};
struct ReconPatternMismatch : BxError {
  using BxError::BxError;
};
struct TraceMismatch : BxError {
  using BxError::BxError;
};
// Put-side, guided mode: a concrete exit condition contradicts the guide.
struct ExitConditionRejects : BxError {
  int branch;
  ExitConditionRejects(int b, const std::string& what)
      : BxError("branch " + std::to_string(b) + ": " + what), branch(b) {}
};
struct EntryTypeError : BxError {
  using BxError::BxError;
};

// --------------------------------------------------------------------------
// Pattern semantics and environment algebra
// --------------------------------------------------------------------------

// [[p]] u: bindings with domain fv(p) such that u = p[bindings], or nullopt.
std::optional<ValueEnv> patMatch(const PatPtr& p, const FOPtr& u);

// [[p]]^-1 mu: the unique value matching p under mu. MissingBinding if a
// pattern variable is absent.
FOPtr patBuild(const PatPtr& p, const ValueEnv& mu);

// mu1 ⋎ mu2: union; MergeConflict when the shared domain disagrees.
ValueEnv envMerge(const ValueEnv& a, const ValueEnv& b);

// mu ⊎_{X,Y}: partition by membership; DomainViolation if X and Y overlap or
// a binding belongs to neither side.
std::pair<ValueEnv, ValueEnv> envSplit(const ValueEnv& mu, const std::set<std::string>& X,
                                       const std::set<std::string>& Y);

// mu' ◁ mu: mu' wins, mu fills the rest.
ValueEnv envDefault(const ValueEnv& upd, const ValueEnv& base);

// mu1 ⊎ mu2: union of environments with disjoint domains (DomainViolation).
ValueEnv envDisjointUnion(const ValueEnv& a, const ValueEnv& b);

// --------------------------------------------------------------------------
// Traced get / put
// --------------------------------------------------------------------------

struct GetResult {
  FOPtr value;
  TracePtr trace;
};
struct PutResult {
  ValueEnv env;  // domain: the free variables of the residual
  TracePtr trace;
};

// An exit condition that bottomed out in an unfilled hole: which hole, the
// first-order bindings in scope at it, and the truth value the surrounding
// rule requires. Emitted instead of failing, so filtering can defer the
// check until hole completion.
struct ExitHoleEvent {
  int holeId = -1;
  ValueEnv bindingEnv;
  bool expected = true;
  int siteId = -1;
  int branch = -1;
};
using ExitHoleSink = std::function<void(const ExitHoleEvent&)>;

// One bidirectional-case decision made by a backward run: which branch the
// forward execution took on the original source (none when the original
// scrutinee matches no pattern), which branch the backward run descends, and
// the concrete values the decision was made on.
struct BranchEvent {
  int siteId = -1;
  std::optional<int> originalBranch;
  int takenBranch = -1;
  FOPtr originalScrutinee;
  FOPtr updatedView;
};
using BranchEventSink = std::function<void(const BranchEvent&)>;

class BxEval {
 public:
  explicit BxEval(Evaluator& ev, ExitHoleSink onExitHole = nullptr,
                  BranchEventSink onBranch = nullptr)
      : ev_(ev), sink_(std::move(onExitHole)), branchSink_(std::move(onBranch)) {}

  // Forward: value of E under mu plus the branch trace.
  GetResult get(const ValueEnv& mu, const ResPtr& E);

  // Backward: updated bindings for the free variables of E. Untraced mode
  // (guide null) selects branches by exit conditions, original branch first;
  // guided mode follows the guide's branch at every Br node and defers holed
  // exit conditions through the sink.
  PutResult put(const ValueEnv& mu, const ResPtr& E, const FOPtr& u,
                const TracePtr& guide = nullptr);

  Evaluator& evaluator() { return ev_; }

 private:
  Evaluator& ev_;
  ExitHoleSink sink_;
  BranchEventSink branchSink_;

  // Evaluate an exit condition on u; nullopt = deferred hole (event emitted).
  std::optional<bool> checkExit(const ValPtr& cond, const FOPtr& u, int siteId, int branch,
                                bool expected);
  ResPtr forceBody(const ExprPtr& body);
};

// One-shot convenience wrappers (no sink).
GetResult getT(Evaluator& ev, const ValueEnv& mu, const ResPtr& E);
PutResult putT(Evaluator& ev, const ValueEnv& mu, const ResPtr& E, const FOPtr& u,
               const TracePtr& guide = nullptr);

// --------------------------------------------------------------------------
// Whole-program wrappers
// --------------------------------------------------------------------------

// Residualize `entry x` for a fresh x using the given evaluator; returns the
// residual and the variable name to bind the source to.
std::pair<ResPtr, std::string> residualizeEntry(Evaluator& ev, const ExprPtr& entry);

// get/put of an entry of type BX sigma -> BX tau on a concrete source.
// EntryTypeError if the entry does not have such a type.
FOPtr runGet(const SynthesisInput& in, const ExprPtr& entry, const FOPtr& s);
FOPtr runPut(const SynthesisInput& in, const ExprPtr& entry, const FOPtr& s, const FOPtr& v);

}  // namespace bx
