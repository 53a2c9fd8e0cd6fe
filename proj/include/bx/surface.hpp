#pragma once

// Surface syntax: lexer, parser, and pretty-printer for .bxs files.
//
// Grammar (layout-insensitive; braces and semicolons delimit case branches):
//
//   file   ::= item*
//   item   ::= "data" Upper lower* "=" con ("|" con)*
//            | lower ":" type                      -- signature (concrete)
//            | lower lower* "=" expr               -- definition (params sugar)
//            | "#entry" expr
//            | "#example" "put" foAtom foAtom "=" foApp
//            | "#component" lower
//
//   type   ::= btype ("->" type)?
//   btype  ::= "BX" atype | Upper atype* | atype
//   atype  ::= Upper | lower | "[" type "]" | "(" type "," type ")" | "(" type ")"
//
//   expr   ::= "\" param+ "->" expr
//            | "case" cexpr "of" "{" branch (";" branch)* "}"
//            | "case*" cexpr "of" "{" bbranch (";" bbranch)* "}"
//            | cexpr
//   cexpr  ::= app ((":" | ":*") cexpr)?          -- cons, right-associative
//   app    ::= unit+                              -- constructors fully applied
//   unit   ::= "!" unit | atom "*"?               -- "*" after (e,e) and [] only
//   atom   ::= lower | Upper | Upper"*" | nat | char | string
//            | "(" expr ")" | "(" expr "," expr ")" | "[" (expr ("," expr)*)? "]"
//
//   pat    ::= papp (":" pat)?
//   papp   ::= Upper patom* | patom
//   patom  ::= lower | "_" | Upper | nat | char
//            | "[" (pat ("," pat)*)? "]" | "(" pat "," pat ")" | "(" pat ")"
//
//   branch  ::= pat "->" expr
//   bbranch ::= pat "->" expr "with" expr "by" expr
//
// Comments run from "--" to end of line. Strings/chars use \n \t \\ \' \"
// escapes. Nat literals are Peano sugar; strings are char lists. Wildcards
// become fresh variables (printed back as "_").

#include <string>
#include <vector>

#include "bx/syntax.hpp"

namespace bx {

struct SyntaxError : BxError {
  int line;
  int col;
  SyntaxError(int line_, int col_, const std::string& message)
      : BxError(std::to_string(line_) + ":" + std::to_string(col_) + ": " + message),
        line(line_),
        col(col_) {}
};

struct UnfilledHole : BxError {
  int holeId;
  explicit UnfilledHole(int id)
      : BxError("hole ?" + std::to_string(id) + " has not been filled"), holeId(id) {}
};

// Parsed .bxs file. `datatypes` already includes the predeclared ones.
struct SpecFile {
  DataDeclTable datatypes;
  std::vector<Definition> definitions;  // file order
  std::map<std::string, TypePtr> signatures;
  ExprPtr entry;  // exactly one #entry per file
  std::vector<Example> examples;
  std::set<std::string> componentNames;  // from #component directives
};

SpecFile parseSpec(const std::string& text);

// First-order value literal, e.g. ([1,2,3],[4,5]) or "plum;" or Left 2.
FOPtr parseFOValue(const std::string& text, const DataDeclTable& datatypes);

// Assemble the synthesis input: injects the boolean prelude definitions
// (not/and/or) unless redefined, computes the typing environment, and marks
// definitions unreachable from the entry expression as components.
SynthesisInput toSynthesisInput(const SpecFile& file);

// Deterministic, reparseable rendering. printProgram rejects remaining holes;
// printExpr renders a hole as ?<id> for diagnostics (not reparseable).
std::string printExpr(const ExprPtr& e);
std::string printType(const TypePtr& t);
std::string printProgram(const std::vector<Definition>& defs);

}  // namespace bx
