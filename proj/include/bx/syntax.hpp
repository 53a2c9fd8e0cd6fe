#pragma once

// Core data model: types, datatype declarations, patterns, expressions,
// values, residual expressions, traces, holes, and synthesis inputs.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bx {

struct BxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Source position; line 0 means "synthesized / unknown".
struct Pos {
  int line = 0;
  int col = 0;
};

// --------------------------------------------------------------------------
// Types
//
// A type is a concrete datatype instance (e.g. [Int], (Char,Int)), a function
// type, or a BX wrapper. BX may only wrap first-order types: no functions and
// no nested BX anywhere inside, enforced by the smart constructor.
// Datatype declarations are parameterized templates (List a, Pair a b, ...);
// inside a template, a parameter occurrence is represented as a Data node
// with the parameter's name and no arguments. Types appearing in programs,
// signatures, and values are always fully concrete.
// --------------------------------------------------------------------------

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct TData {
  std::string name;
  std::vector<TypePtr> args;
};
struct TFun {
  TypePtr arg;
  TypePtr result;
};
struct TBX {
  TypePtr inner;
};

struct Type {
  std::variant<TData, TFun, TBX> node;
};

struct BadTypeError : BxError {
  using BxError::BxError;
};

TypePtr dataType(std::string name, std::vector<TypePtr> args = {});
TypePtr funType(TypePtr arg, TypePtr result);
TypePtr bxType(TypePtr inner);  // throws BadTypeError if inner is not first-order

bool typeEq(const TypePtr& a, const TypePtr& b);
bool isFirstOrder(const TypePtr& t);  // no TFun and no TBX anywhere
bool isFun(const TypePtr& t);
bool isBX(const TypePtr& t);
bool isData(const TypePtr& t, const std::string& name);
std::string showType(const TypePtr& t);

// Convenience names for the predeclared datatypes.
TypePtr tInt();
TypePtr tBool();
TypePtr tChar();
TypePtr tList(TypePtr elem);
TypePtr tPair(TypePtr a, TypePtr b);
TypePtr tEither(TypePtr a, TypePtr b);

// --------------------------------------------------------------------------
// Datatype declarations
// --------------------------------------------------------------------------

struct ConDecl {
  std::string name;           // globally unique across all datatypes
  std::vector<TypePtr> args;  // may mention the declaring datatype's params
};

struct DataDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<ConDecl> constructors;
};

struct DeclError : BxError {
  using BxError::BxError;
};

class DataDeclTable {
 public:
  // Starts with the predeclared datatypes: Bool, Int (Peano Z/S), List,
  // Pair, Either, and Char (one nullary constructor per supported character,
  // 'a' declared first so it is the minimal-cost character constant).
  static DataDeclTable prelude();
  static DataDeclTable empty();

  void declare(const DataDecl& d);  // throws DeclError on duplicates
  const DataDecl* find(const std::string& datatypeName) const;

  struct ConInfo {
    const DataDecl* decl;
    int index;  // position within decl->constructors
  };
  std::optional<ConInfo> findCon(const std::string& conName) const;
  int conArity(const std::string& conName) const;  // throws DeclError if unknown

  // Instantiate a constructor's argument types against the concrete datatype
  // instance it should produce. Returns nullopt when the constructor does not
  // belong to resultType's datatype.
  std::optional<std::vector<TypePtr>> conArgTypes(const std::string& conName,
                                                  const TypePtr& resultType) const;

  // Concrete result type of a constructor given the datatype's type arguments.
  TypePtr conResultType(const std::string& conName,
                        const std::vector<TypePtr>& typeArgs) const;

  std::vector<const DataDecl*> all() const;

 private:
  // shared_ptr storage keeps DataDecl* stable across table copies
  std::vector<std::shared_ptr<const DataDecl>> decls_;  // declaration order
  std::map<std::string, int> byName_;                   // datatype name -> index
  std::map<std::string, std::pair<int, int>> byCon_;    // con -> (decl, index)
};

// --------------------------------------------------------------------------
// Patterns (linear; wildcards are desugared to fresh variables by the parser)
// --------------------------------------------------------------------------

struct Pattern;
using PatPtr = std::shared_ptr<const Pattern>;

struct PVar {
  std::string name;
};
struct PCon {
  std::string con;
  std::vector<PatPtr> args;
};

struct Pattern {
  std::variant<PVar, PCon> node;
};

PatPtr pvar(std::string name);
PatPtr pcon(std::string con, std::vector<PatPtr> args = {});

std::vector<std::string> patVars(const PatPtr& p);  // left-to-right
bool patIsLinear(const PatPtr& p);
bool patEq(const PatPtr& a, const PatPtr& b);  // structural, names included
bool patIsBareVar(const PatPtr& p);
std::string showPattern(const PatPtr& p);

// --------------------------------------------------------------------------
// First-order values
// --------------------------------------------------------------------------

struct FOVal;
using FOPtr = std::shared_ptr<const FOVal>;

struct FOVal {
  std::string con;
  std::vector<FOPtr> args;
};

FOPtr fo(std::string con, std::vector<FOPtr> args = {});
bool foEq(const FOPtr& a, const FOPtr& b);
std::string showFO(const FOPtr& u);  // with nat/list/string/pair/char sugar

FOPtr foNat(long n);
std::optional<long> foToNat(const FOPtr& u);
FOPtr foBool(bool b);
FOPtr foList(const std::vector<FOPtr>& elems);
std::optional<std::vector<FOPtr>> foToList(const FOPtr& u);
FOPtr foChar(char c);
FOPtr foString(const std::string& s);
FOPtr foPair(FOPtr a, FOPtr b);

// --------------------------------------------------------------------------
// Expressions
// --------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Value;
using ValPtr = std::shared_ptr<const Value>;

enum class HoleKind { Exit, Recon, Shape, Generic };

// Static description of a hole, shared by every occurrence of it.
struct HoleInfo {
  int id = -1;
  HoleKind kind = HoleKind::Generic;
  TypePtr targetType;  // Exit: sigma->Bool; Recon: s0->sigma->s0; else the hole's type
  std::map<std::string, TypePtr> envUni;  // unidirectional environment in scope
  ExprPtr branchBody;   // Exit/Recon: the branch body e the hole was made for
  PatPtr branchPattern; // Recon/Shape: branch pattern p (Shape: the shape itself)
};
using HoleInfoPtr = std::shared_ptr<const HoleInfo>;

struct EVar {
  std::string name;
};
struct ELam {
  std::string binder;
  ExprPtr body;
};
struct EApp {
  ExprPtr fn;
  ExprPtr arg;
};
struct ECon {  // fully applied constructor
  std::string con;
  std::vector<ExprPtr> args;
};
struct CaseBranch {
  PatPtr pat;
  ExprPtr body;
};
struct ECase {
  ExprPtr scrut;
  std::vector<CaseBranch> branches;
};
struct EBCon {
  std::string con;
  std::vector<ExprPtr> args;
};
struct BCaseBranch {
  PatPtr pat;
  ExprPtr body;
  ExprPtr exitCond;  // expression or hole; never null in checked programs
  ExprPtr recon;     // expression or hole; never null in checked programs
};
struct EBCase {
  ExprPtr scrut;
  std::vector<BCaseBranch> branches;
};
struct ELift {
  ExprPtr body;
};
struct EHole {
  HoleInfoPtr info;
  // Substitutions that reached this hole; first-order bindings only. These
  // become the bindingEnv of exit-condition constraints during filtering.
  std::map<std::string, FOPtr> pending;
};
// Internal node: a value substituted into an expression (substitution-based
// call-by-value evaluation). Never produced by the parser.
struct EQuote {
  ValPtr v;
};

struct Expr {
  std::variant<EVar, ELam, EApp, ECon, ECase, EBCon, EBCase, ELift, EHole, EQuote> node;
  Pos pos;
};

ExprPtr evar(std::string name, Pos pos = {});
ExprPtr elam(std::string binder, ExprPtr body, Pos pos = {});
ExprPtr eapp(ExprPtr fn, ExprPtr arg, Pos pos = {});
ExprPtr econ(std::string con, std::vector<ExprPtr> args = {}, Pos pos = {});
ExprPtr ecase(ExprPtr scrut, std::vector<CaseBranch> branches, Pos pos = {});
ExprPtr ebcon(std::string con, std::vector<ExprPtr> args = {}, Pos pos = {});
ExprPtr ebcase(ExprPtr scrut, std::vector<BCaseBranch> branches, Pos pos = {});
ExprPtr elift(ExprPtr body, Pos pos = {});
ExprPtr ehole(HoleInfoPtr info, std::map<std::string, FOPtr> pending = {});
ExprPtr equote(ValPtr v);
ExprPtr efo(const FOPtr& u);  // quote of a first-order value

// Free variables (lambda/pattern binding respected; program-level names are
// ordinary free variables here and get resolved by the evaluator).
std::set<std::string> freeVars(const ExprPtr& e);
bool containsHole(const ExprPtr& e);
void collectHoles(const ExprPtr& e, std::vector<ExprPtr>& out);  // EHole nodes, left-to-right

// Replace each hole whose id is mapped by a copy of its replacement; holes
// with unmapped ids stay in place. Only meaningful on static program text,
// where holes carry no pending substitutions yet.
ExprPtr fillHoles(const ExprPtr& e, const std::map<int, ExprPtr>& fills);

// Alpha-equivalence on expressions (used to dedup enumerated terms and to
// compare parsed/printed programs).
bool alphaEq(const ExprPtr& a, const ExprPtr& b);

// --------------------------------------------------------------------------
// Values and residual expressions
// --------------------------------------------------------------------------

struct Res;
using ResPtr = std::shared_ptr<const Res>;

struct VFO {
  FOPtr u;
};
struct VClo {  // substitution-based evaluation: the body is already closed
  std::string binder;
  ExprPtr body;
};
struct VRes {
  ResPtr r;
};

struct Value {
  std::variant<VFO, VClo, VRes> node;
};

ValPtr vfo(FOPtr u);
ValPtr vclo(std::string binder, ExprPtr body);
ValPtr vres(ResPtr r);

struct RVar {
  std::string name;
};
struct RBCon {
  std::string con;
  std::vector<ResPtr> args;
};
struct RBranch {
  PatPtr pat;       // pattern with freshened variables
  ExprPtr body;     // delayed: evaluated on demand during get/put
  ValPtr exitCond;  // evaluated closure (may contain holes inside its body)
  ValPtr recon;     // evaluated closure
};
struct RBCase {
  ResPtr scrut;
  std::vector<RBranch> branches;
  int siteId = -1;  // stable id for diagnostics and branch events
};
struct RLift {
  FOPtr u;
};

struct Res {
  std::variant<RVar, RBCon, RBCase, RLift> node;
};

ResPtr rvar(std::string name);
ResPtr rbcon(std::string con, std::vector<ResPtr> args);
ResPtr rbcase(ResPtr scrut, std::vector<RBranch> branches, int siteId);
ResPtr rlift(FOPtr u);

std::set<std::string> resFreeVars(const ResPtr& r);

// --------------------------------------------------------------------------
// Traces
// --------------------------------------------------------------------------

struct Trace;
using TracePtr = std::shared_ptr<const Trace>;

struct TEps {};
struct TBr {
  TracePtr scrut;
  int branch;  // 0-based
  TracePtr body;
};
struct TTup {
  std::vector<TracePtr> parts;
};

struct Trace {
  std::variant<TEps, TBr, TTup> node;
};

TracePtr tEps();
TracePtr tBr(TracePtr scrut, int branch, TracePtr body);
TracePtr tTup(std::vector<TracePtr> parts);
bool traceEq(const TracePtr& a, const TracePtr& b);
std::string showTrace(const TracePtr& t);  // Br(eps,1,[eps,...]) notation

// --------------------------------------------------------------------------
// Environments, programs, synthesis inputs
// --------------------------------------------------------------------------

using ValueEnv = std::map<std::string, FOPtr>;

std::string showValueEnv(const ValueEnv& mu);

struct Definition {
  std::string name;
  ExprPtr body;
};

// Dual contexts: uni maps ordinary variables/components, bx maps bx-case
// pattern variables (values are the sigma types, never Function/BX).
struct TypeEnvs {
  std::map<std::string, TypePtr> uni;
  std::map<std::string, TypePtr> bx;
};

struct Example {
  FOPtr source;
  FOPtr updatedView;
  FOPtr updatedSource;
};

struct SynthesisInput {
  DataDeclTable datatypes;
  std::vector<Definition> program;  // declaration order
  std::map<std::string, TypePtr> typingEnv;
  ExprPtr entry;  // type sigma1 -> tau1 over program names
  std::vector<Example> examples;
  std::set<std::string> components;    // names usable as enumeration components
  std::set<std::string> preludeNames;  // injected definitions, hidden on print
};

// --------------------------------------------------------------------------
// Fresh names
// --------------------------------------------------------------------------

// Smallest decorated variant of `hint` not present in `avoid` (hint itself
// first, then hint0, hint1, ...).
std::string freshVar(const std::string& hint, const std::set<std::string>& avoid);

// Counter-based supply for residualization and shape patterns. Produced
// names contain '#', which the surface grammar rejects in identifiers, so
// they can never collide with user-written variables.
struct NameSupply {
  int next = 0;
  std::string fresh(const std::string& hint) {
    std::string base = hint.substr(0, hint.find('#'));
    return base + "#" + std::to_string(next++);
  }
};

}  // namespace bx
