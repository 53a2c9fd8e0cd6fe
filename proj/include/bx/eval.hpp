#pragma once

// Unidirectional big-step evaluation. Call-by-value and substitution-based:
// beta reduction substitutes the (already evaluated) argument into the body,
// so values never carry environments. Bidirectional constructs freeze into
// residual expressions: variables left free become residual variables,
// bidirectional constructors build residual nodes, and a bidirectional case
// evaluates its scrutinee and with/by slots but keeps branch bodies delayed
// as expressions, to be residualized on demand during get/put descent.

#include <functional>
#include <optional>

#include "bx/syntax.hpp"

namespace bx {

struct PatternMatchFailure : BxError {
  using BxError::BxError;
};
struct StuckTerm : BxError {
  using BxError::BxError;
};
struct FuelExhausted : BxError {
  using BxError::BxError;
};

// Raised while evaluating an unfilled hole with sentinels disabled.
struct UnfilledHoleEval : BxError {
  int holeId;
  explicit UnfilledHoleEval(int id)
      : BxError("evaluated unfilled hole ?" + std::to_string(id)), holeId(id) {}
};

// Recorded when a hole is reached with sentinels enabled: which hole, and the
// first-order bindings that substitution carried into it.
struct HoleEvent {
  int holeId = -1;
  ValueEnv pending;
};

class Evaluator {
 public:
  static constexpr long kDefaultFuel = 1'000'000;

  explicit Evaluator(const std::vector<Definition>& program, long fuel = kDefaultFuel);

  ValPtr eval(const ExprPtr& e);
  ValPtr apply(const ValPtr& fn, const ValPtr& arg);
  ValPtr applyAll(const ValPtr& fn, const std::vector<FOPtr>& args);

  // Evaluate an applied Bool-returning closure; nullopt when the result is a
  // hole sentinel (sentinels enabled), with the event left for takeHoleEvent.
  std::optional<bool> evalBool(const ValPtr& fn, const std::vector<FOPtr>& args);

  // Hole sentinel support for trace-guided filtering. With sentinels on, an
  // unfilled hole evaluates to an opaque first-order marker and records a
  // HoleEvent instead of failing.
  void enableHoleSentinels(bool on) { sentinels_ = on; }
  std::optional<HoleEvent> takeHoleEvent();
  static bool isHoleSentinel(const ValPtr& v);
  static bool isHoleSentinelFO(const FOPtr& u);

  // Shared fresh-name supply: every bx-case residualized during one
  // evaluator's lifetime gets globally distinct pattern variables.
  NameSupply& names() { return supply_; }
  int freshSiteId() { return nextSite_++; }

  const std::map<std::string, ExprPtr>& definitions() const { return defs_; }

 private:
  std::map<std::string, ExprPtr> defs_;
  long fuel_;
  NameSupply supply_;
  int nextSite_ = 0;
  bool sentinels_ = false;
  std::optional<HoleEvent> event_;

  void spend();
};

// Replace free occurrences of `name` with the quoted value. Descends into
// delayed branch bodies and with/by slots; respects binder shadowing. A
// first-order value reaching a hole is recorded in the hole's pending
// bindings (holes never legitimately reference higher-order locals).
ExprPtr substValue(const ExprPtr& e, const std::string& name, const ValPtr& v);

// Rename a free variable (used when freshening bidirectional-case patterns).
ExprPtr substRename(const ExprPtr& e, const std::string& name, const std::string& newName);

// Convenience wrappers over a one-shot Evaluator.
ValPtr evalU(const std::vector<Definition>& program, const ExprPtr& e);
bool evalUBool(const std::vector<Definition>& program, const ValPtr& fn,
               const std::vector<FOPtr>& args);

// The first-order payload of a value; throws StuckTerm otherwise.
FOPtr valueToFO(const ValPtr& v);

}  // namespace bx
