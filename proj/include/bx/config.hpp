#pragma once

// Search calibration knobs: weights on grammar choices, cost/time budgets,
// and enumeration caps. Loaded from `key = value` files and/or overridden by
// command-line flags.

#include <string>

#include "bx/syntax.hpp"

namespace bx {

struct ConfigError : BxError {
  explicit ConfigError(const std::string& msg) : BxError("config: " + msg) {}
};

// Costs of grammar choices during sketch generation and hole filling.
struct Weights {
  long var = 1;        // weights.var — variable reference
  long con = 1;        // weights.con — constructor application
  long lambda = 1;     // weights.lambda — lambda abstraction
  long app = 1;        // weights.app — application node
  long caseExpr = 3;   // weights.case — a case expression
  long branch = 1;     // weights.branch — each case branch beyond the first
  long component = 2;  // weights.component — auxiliary component call
  long boolConst = 1;  // weights.bool — constants True/False (True first)
  long lift = 2;       // weights.lift — a lift (!e) sketch alternative
  long bxWrap = 1;     // weights.bx — each BX wrapper inserted on a type
};

struct Config {
  Weights weights;
  long budgetCost = 60;        // budget.cost — max candidate cost
  double budgetSeconds = 600;  // budget.seconds — wall-clock budget
  int caseDepth = 2;           // enum.case_depth — nested case cap in shaped terms
  int maxAtoms = 3;            // enum.max_atoms — atoms per DNF conjunct/disjunct

  // Applies one `key = value` assignment; throws ConfigError on unknown keys
  // or unparsable values.
  void set(const std::string& key, const std::string& value);

  // Parses a whole config file (one assignment per line; '#' comments).
  static Config fromFile(const std::string& path);

  // Parses assignments from text (same syntax as fromFile), onto defaults.
  static Config fromText(const std::string& text);

  std::string show() const;
};

}  // namespace bx
