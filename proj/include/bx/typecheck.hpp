#pragma once

// Dual-context type checking. Expressions are checked under a pair of
// environments: `uni` holds ordinary (unidirectional) bindings, `bx` holds
// bidirectional-case pattern variables. A `bx` variable of type sigma is used
// at type BX sigma; it is visible in branch bodies but not in exit-condition
// or reconciliation slots.

#include "bx/syntax.hpp"

namespace bx {

struct TypeError : BxError {
  Pos pos;
  std::string found;
  std::string expected;
  TypeError(Pos p, std::string found_, std::string expected_)
      : BxError(std::to_string(p.line) + ":" + std::to_string(p.col) + ": expected " + expected_ +
                ", found " + found_),
        pos(p),
        found(std::move(found_)),
        expected(std::move(expected_)) {}
};

struct UnboundVariable : BxError {
  std::string name;
  UnboundVariable(Pos p, const std::string& n)
      : BxError(std::to_string(p.line) + ":" + std::to_string(p.col) + ": unbound variable " + n),
        name(n) {}
};

struct NonLinearPattern : BxError {
  using BxError::BxError;
};

struct ConstructorArity : BxError {
  using BxError::BxError;
};

// Check e against `expected`; throws on failure.
void checkExpr(const DataDeclTable& datatypes, const TypeEnvs& envs, const ExprPtr& e,
               const TypePtr& expected);

// Synthesize a type for e (variables, applications, constructors of
// parameter-free datatypes, case with inferable first branch, lifts, holes).
TypePtr inferExpr(const DataDeclTable& datatypes, const TypeEnvs& envs, const ExprPtr& e);

// Bindings produced by matching p against a scrutinee of the given type.
std::map<std::string, TypePtr> checkPattern(const DataDeclTable& datatypes, const PatPtr& p,
                                            const TypePtr& scrutineeType);

// Check every program binding against its signature (empty bx context).
void checkProgram(const SynthesisInput& input);

}  // namespace bx
