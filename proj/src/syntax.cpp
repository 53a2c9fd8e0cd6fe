#include "bx/syntax.hpp"

#include <algorithm>
#include <functional>

namespace bx {

// --------------------------------------------------------------------------
// Types
// --------------------------------------------------------------------------

TypePtr dataType(std::string name, std::vector<TypePtr> args) {
  return std::make_shared<Type>(Type{TData{std::move(name), std::move(args)}});
}

TypePtr funType(TypePtr arg, TypePtr result) {
  return std::make_shared<Type>(Type{TFun{std::move(arg), std::move(result)}});
}

TypePtr bxType(TypePtr inner) {
  if (!isFirstOrder(inner))
    throw BadTypeError("BX may only wrap first-order types, got BX (" + showType(inner) + ")");
  return std::make_shared<Type>(Type{TBX{std::move(inner)}});
}

bool typeEq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* da = std::get_if<TData>(&a->node)) {
    auto* db = std::get_if<TData>(&b->node);
    if (da->name != db->name || da->args.size() != db->args.size()) return false;
    for (size_t i = 0; i < da->args.size(); ++i)
      if (!typeEq(da->args[i], db->args[i])) return false;
    return true;
  }
  if (auto* fa = std::get_if<TFun>(&a->node)) {
    auto* fb = std::get_if<TFun>(&b->node);
    return typeEq(fa->arg, fb->arg) && typeEq(fa->result, fb->result);
  }
  auto* xa = std::get_if<TBX>(&a->node);
  auto* xb = std::get_if<TBX>(&b->node);
  return typeEq(xa->inner, xb->inner);
}

bool isFirstOrder(const TypePtr& t) {
  if (!t) return false;
  if (std::holds_alternative<TFun>(t->node) || std::holds_alternative<TBX>(t->node)) return false;
  const auto& d = std::get<TData>(t->node);
  return std::all_of(d.args.begin(), d.args.end(), [](const TypePtr& a) { return isFirstOrder(a); });
}

bool isFun(const TypePtr& t) { return t && std::holds_alternative<TFun>(t->node); }
bool isBX(const TypePtr& t) { return t && std::holds_alternative<TBX>(t->node); }

bool isData(const TypePtr& t, const std::string& name) {
  if (!t) return false;
  auto* d = std::get_if<TData>(&t->node);
  return d && d->name == name;
}

namespace {

// parenthesize compound types in argument position
std::string showTypeAtom(const TypePtr& t) {
  std::string s = showType(t);
  if (std::holds_alternative<TFun>(t->node) || std::holds_alternative<TBX>(t->node))
    return "(" + s + ")";
  const auto& d = std::get<TData>(t->node);
  if (!d.args.empty() && d.name != "List" && d.name != "Pair") return "(" + s + ")";
  return s;
}

}  // namespace

std::string showType(const TypePtr& t) {
  if (!t) return "<null>";
  if (auto* d = std::get_if<TData>(&t->node)) {
    if (d->name == "List" && d->args.size() == 1) return "[" + showType(d->args[0]) + "]";
    if (d->name == "Pair" && d->args.size() == 2)
      return "(" + showType(d->args[0]) + ", " + showType(d->args[1]) + ")";
    std::string s = d->name;
    for (const auto& a : d->args) s += " " + showTypeAtom(a);
    return s;
  }
  if (auto* f = std::get_if<TFun>(&t->node)) {
    std::string lhs = showType(f->arg);
    if (isFun(f->arg)) lhs = "(" + lhs + ")";
    return lhs + " -> " + showType(f->result);
  }
  const auto& x = std::get<TBX>(t->node);
  return "BX " + showTypeAtom(x.inner);
}

TypePtr tInt() {
  static const TypePtr t = dataType("Int");
  return t;
}
TypePtr tBool() {
  static const TypePtr t = dataType("Bool");
  return t;
}
TypePtr tChar() {
  static const TypePtr t = dataType("Char");
  return t;
}
TypePtr tList(TypePtr elem) { return dataType("List", {std::move(elem)}); }
TypePtr tPair(TypePtr a, TypePtr b) { return dataType("Pair", {std::move(a), std::move(b)}); }
TypePtr tEither(TypePtr a, TypePtr b) { return dataType("Either", {std::move(a), std::move(b)}); }

// --------------------------------------------------------------------------
// DataDeclTable
// --------------------------------------------------------------------------

DataDeclTable DataDeclTable::empty() { return DataDeclTable{}; }

DataDeclTable DataDeclTable::prelude() {
  DataDeclTable t;
  TypePtr a = dataType("a"), b = dataType("b");
  t.declare(DataDecl{"Bool", {}, {{"True", {}}, {"False", {}}}});
  t.declare(DataDecl{"Int", {}, {{"Z", {}}, {"S", {tInt()}}}});
  t.declare(DataDecl{"List", {"a"}, {{"[]", {}}, {":", {a, dataType("List", {a})}}}});
  t.declare(DataDecl{"Pair", {"a", "b"}, {{"(,)", {a, b}}}});
  t.declare(DataDecl{"Either", {"a", "b"}, {{"Left", {a}}, {"Right", {b}}}});

  // One nullary constructor per supported character; 'a' first so it is the
  // minimal-cost character constant during enumeration.
  DataDecl ch{"Char", {}, {}};
  std::string chars;
  for (char c = 'a'; c <= 'z'; ++c) chars += c;
  for (char c = 'A'; c <= 'Z'; ++c) chars += c;
  for (char c = '0'; c <= '9'; ++c) chars += c;
  chars += ' ';
  chars += '\n';
  for (char c : std::string(";.,-_!?:/()")) chars += c;
  for (char c : chars) ch.constructors.push_back({std::string("'") + c + "'", {}});
  t.declare(ch);
  return t;
}

void DataDeclTable::declare(const DataDecl& d) {
  if (byName_.count(d.name)) throw DeclError("duplicate datatype " + d.name);
  for (const auto& c : d.constructors)
    if (byCon_.count(c.name)) throw DeclError("duplicate constructor " + c.name);
  int idx = static_cast<int>(decls_.size());
  decls_.push_back(std::make_shared<DataDecl>(d));
  byName_[d.name] = idx;
  for (size_t i = 0; i < d.constructors.size(); ++i)
    byCon_[d.constructors[i].name] = {idx, static_cast<int>(i)};
}

const DataDecl* DataDeclTable::find(const std::string& datatypeName) const {
  auto it = byName_.find(datatypeName);
  return it == byName_.end() ? nullptr : decls_[it->second].get();
}

std::optional<DataDeclTable::ConInfo> DataDeclTable::findCon(const std::string& conName) const {
  auto it = byCon_.find(conName);
  if (it == byCon_.end()) return std::nullopt;
  return ConInfo{decls_[it->second.first].get(), it->second.second};
}

int DataDeclTable::conArity(const std::string& conName) const {
  auto ci = findCon(conName);
  if (!ci) throw DeclError("unknown constructor " + conName);
  return static_cast<int>(ci->decl->constructors[ci->index].args.size());
}

namespace {

TypePtr substParams(const TypePtr& t, const std::map<std::string, TypePtr>& sub) {
  if (auto* d = std::get_if<TData>(&t->node)) {
    if (d->args.empty()) {
      auto it = sub.find(d->name);
      if (it != sub.end()) return it->second;
    }
    std::vector<TypePtr> args;
    args.reserve(d->args.size());
    for (const auto& a : d->args) args.push_back(substParams(a, sub));
    return dataType(d->name, std::move(args));
  }
  if (auto* f = std::get_if<TFun>(&t->node))
    return funType(substParams(f->arg, sub), substParams(f->result, sub));
  return bxType(substParams(std::get<TBX>(t->node).inner, sub));
}

}  // namespace

std::optional<std::vector<TypePtr>> DataDeclTable::conArgTypes(const std::string& conName,
                                                               const TypePtr& resultType) const {
  auto ci = findCon(conName);
  if (!ci) return std::nullopt;
  auto* d = std::get_if<TData>(&resultType->node);
  if (!d || d->name != ci->decl->name || d->args.size() != ci->decl->params.size())
    return std::nullopt;
  std::map<std::string, TypePtr> sub;
  for (size_t i = 0; i < d->args.size(); ++i) sub[ci->decl->params[i]] = d->args[i];
  std::vector<TypePtr> out;
  for (const auto& at : ci->decl->constructors[ci->index].args) out.push_back(substParams(at, sub));
  return out;
}

TypePtr DataDeclTable::conResultType(const std::string& conName,
                                     const std::vector<TypePtr>& typeArgs) const {
  auto ci = findCon(conName);
  if (!ci) throw DeclError("unknown constructor " + conName);
  return dataType(ci->decl->name, typeArgs);
}

std::vector<const DataDecl*> DataDeclTable::all() const {
  std::vector<const DataDecl*> out;
  out.reserve(decls_.size());
  for (const auto& d : decls_) out.push_back(d.get());
  return out;
}

// --------------------------------------------------------------------------
// Patterns
// --------------------------------------------------------------------------

PatPtr pvar(std::string name) { return std::make_shared<Pattern>(Pattern{PVar{std::move(name)}}); }

PatPtr pcon(std::string con, std::vector<PatPtr> args) {
  return std::make_shared<Pattern>(Pattern{PCon{std::move(con), std::move(args)}});
}

static void patVarsGo(const PatPtr& p, std::vector<std::string>& out) {
  if (auto* v = std::get_if<PVar>(&p->node)) {
    out.push_back(v->name);
    return;
  }
  for (const auto& q : std::get<PCon>(p->node).args) patVarsGo(q, out);
}

std::vector<std::string> patVars(const PatPtr& p) {
  std::vector<std::string> out;
  patVarsGo(p, out);
  return out;
}

bool patIsLinear(const PatPtr& p) {
  auto vs = patVars(p);
  std::set<std::string> seen(vs.begin(), vs.end());
  return seen.size() == vs.size();
}

bool patEq(const PatPtr& a, const PatPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* va = std::get_if<PVar>(&a->node)) return va->name == std::get<PVar>(b->node).name;
  const auto& ca = std::get<PCon>(a->node);
  const auto& cb = std::get<PCon>(b->node);
  if (ca.con != cb.con || ca.args.size() != cb.args.size()) return false;
  for (size_t i = 0; i < ca.args.size(); ++i)
    if (!patEq(ca.args[i], cb.args[i])) return false;
  return true;
}

bool patIsBareVar(const PatPtr& p) { return std::holds_alternative<PVar>(p->node); }

std::string showPattern(const PatPtr& p) {
  if (auto* v = std::get_if<PVar>(&p->node)) return v->name;
  const auto& c = std::get<PCon>(p->node);
  if (c.con == ":") {
    std::string hd = showPattern(c.args[0]);
    bool hdAtom = std::holds_alternative<PVar>(c.args[0]->node) ||
                  std::get<PCon>(c.args[0]->node).args.empty() ||
                  std::get<PCon>(c.args[0]->node).con == "(,)";
    return (hdAtom ? hd : "(" + hd + ")") + " : " + showPattern(c.args[1]);
  }
  if (c.con == "(,)") return "(" + showPattern(c.args[0]) + ", " + showPattern(c.args[1]) + ")";
  if (c.args.empty()) return c.con;
  std::string s = c.con;
  for (const auto& a : c.args) {
    std::string as = showPattern(a);
    bool atom = std::holds_alternative<PVar>(a->node) ||
                std::get<PCon>(a->node).args.empty() ||
                std::get<PCon>(a->node).con == "(,)";
    s += " " + (atom ? as : "(" + as + ")");
  }
  return s;
}

// --------------------------------------------------------------------------
// First-order values
// --------------------------------------------------------------------------

FOPtr fo(std::string con, std::vector<FOPtr> args) {
  return std::make_shared<FOVal>(FOVal{std::move(con), std::move(args)});
}

bool foEq(const FOPtr& a, const FOPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->con != b->con || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!foEq(a->args[i], b->args[i])) return false;
  return true;
}

FOPtr foNat(long n) {
  FOPtr u = fo("Z");
  for (long i = 0; i < n; ++i) u = fo("S", {u});
  return u;
}

std::optional<long> foToNat(const FOPtr& u) {
  long n = 0;
  const FOVal* cur = u.get();
  while (true) {
    if (cur->con == "Z" && cur->args.empty()) return n;
    if (cur->con == "S" && cur->args.size() == 1) {
      ++n;
      cur = cur->args[0].get();
      continue;
    }
    return std::nullopt;
  }
}

FOPtr foBool(bool b) { return fo(b ? "True" : "False"); }

FOPtr foList(const std::vector<FOPtr>& elems) {
  FOPtr u = fo("[]");
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) u = fo(":", {*it, u});
  return u;
}

std::optional<std::vector<FOPtr>> foToList(const FOPtr& u) {
  std::vector<FOPtr> out;
  const FOVal* cur = u.get();
  while (true) {
    if (cur->con == "[]" && cur->args.empty()) return out;
    if (cur->con == ":" && cur->args.size() == 2) {
      out.push_back(cur->args[0]);
      cur = cur->args[1].get();
      continue;
    }
    return std::nullopt;
  }
}

FOPtr foChar(char c) { return fo(std::string("'") + c + "'"); }

FOPtr foString(const std::string& s) {
  std::vector<FOPtr> cs;
  cs.reserve(s.size());
  for (char c : s) cs.push_back(foChar(c));
  return foList(cs);
}

FOPtr foPair(FOPtr a, FOPtr b) { return fo("(,)", {std::move(a), std::move(b)}); }

namespace {

bool foIsChar(const FOPtr& u) {
  return u->args.empty() && u->con.size() == 3 && u->con.front() == '\'' && u->con.back() == '\'';
}

std::string escapeChar(char c, char quote) {
  if (c == '\n') return "\\n";
  if (c == '\t') return "\\t";
  if (c == '\\') return "\\\\";
  if (c == quote) return std::string("\\") + quote;
  return std::string(1, c);
}

std::string showFOAtom(const FOPtr& u);

}  // namespace

std::string showFO(const FOPtr& u) {
  if (!u) return "<null>";
  if (auto n = foToNat(u)) return std::to_string(*n);
  if (foIsChar(u)) return "'" + escapeChar(u->con[1], '\'') + "'";
  if (auto elems = foToList(u)) {
    bool allChars =
        !elems->empty() && std::all_of(elems->begin(), elems->end(), [](const FOPtr& e) { return foIsChar(e); });
    if (allChars) {
      std::string s = "\"";
      for (const auto& e : *elems) s += escapeChar(e->con[1], '"');
      return s + "\"";
    }
    std::string s = "[";
    for (size_t i = 0; i < elems->size(); ++i) {
      if (i) s += ", ";
      s += showFO((*elems)[i]);
    }
    return s + "]";
  }
  if (u->con == "(,)" && u->args.size() == 2)
    return "(" + showFO(u->args[0]) + ", " + showFO(u->args[1]) + ")";
  if (u->args.empty()) return u->con;
  std::string s = u->con;
  for (const auto& a : u->args) s += " " + showFOAtom(a);
  return s;
}

namespace {

std::string showFOAtom(const FOPtr& u) {
  std::string s = showFO(u);
  bool needsParens = !u->args.empty() && !foToNat(u) && !foToList(u) && u->con != "(,)";
  return needsParens ? "(" + s + ")" : s;
}

}  // namespace

// --------------------------------------------------------------------------
// Expressions
// --------------------------------------------------------------------------

namespace {
ExprPtr mkExpr(std::variant<EVar, ELam, EApp, ECon, ECase, EBCon, EBCase, ELift, EHole, EQuote> n,
               Pos pos) {
  return std::make_shared<Expr>(Expr{std::move(n), pos});
}
}  // namespace

ExprPtr evar(std::string name, Pos pos) { return mkExpr(EVar{std::move(name)}, pos); }
ExprPtr elam(std::string binder, ExprPtr body, Pos pos) {
  return mkExpr(ELam{std::move(binder), std::move(body)}, pos);
}
ExprPtr eapp(ExprPtr fn, ExprPtr arg, Pos pos) {
  return mkExpr(EApp{std::move(fn), std::move(arg)}, pos);
}
ExprPtr econ(std::string con, std::vector<ExprPtr> args, Pos pos) {
  return mkExpr(ECon{std::move(con), std::move(args)}, pos);
}
ExprPtr ecase(ExprPtr scrut, std::vector<CaseBranch> branches, Pos pos) {
  return mkExpr(ECase{std::move(scrut), std::move(branches)}, pos);
}
ExprPtr ebcon(std::string con, std::vector<ExprPtr> args, Pos pos) {
  return mkExpr(EBCon{std::move(con), std::move(args)}, pos);
}
ExprPtr ebcase(ExprPtr scrut, std::vector<BCaseBranch> branches, Pos pos) {
  return mkExpr(EBCase{std::move(scrut), std::move(branches)}, pos);
}
ExprPtr elift(ExprPtr body, Pos pos) { return mkExpr(ELift{std::move(body)}, pos); }
ExprPtr ehole(HoleInfoPtr info, std::map<std::string, FOPtr> pending) {
  return mkExpr(EHole{std::move(info), std::move(pending)}, Pos{});
}
ExprPtr equote(ValPtr v) { return mkExpr(EQuote{std::move(v)}, Pos{}); }
ExprPtr efo(const FOPtr& u) { return equote(vfo(u)); }

namespace {

void freeVarsGo(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  struct V {
    std::set<std::string>& bound;
    std::set<std::string>& out;
    void operator()(const EVar& n) {
      if (!bound.count(n.name)) out.insert(n.name);
    }
    void operator()(const ELam& n) {
      bool fresh = bound.insert(n.binder).second;
      freeVarsGo(n.body, bound, out);
      if (fresh) bound.erase(n.binder);
    }
    void operator()(const EApp& n) {
      freeVarsGo(n.fn, bound, out);
      freeVarsGo(n.arg, bound, out);
    }
    void operator()(const ECon& n) {
      for (const auto& a : n.args) freeVarsGo(a, bound, out);
    }
    void operator()(const ECase& n) {
      freeVarsGo(n.scrut, bound, out);
      for (const auto& br : n.branches) branch(br.pat, br.body);
    }
    void operator()(const EBCon& n) {
      for (const auto& a : n.args) freeVarsGo(a, bound, out);
    }
    void operator()(const EBCase& n) {
      freeVarsGo(n.scrut, bound, out);
      for (const auto& br : n.branches) {
        branch(br.pat, br.body);
        if (br.exitCond) freeVarsGo(br.exitCond, bound, out);
        if (br.recon) freeVarsGo(br.recon, bound, out);
      }
    }
    void operator()(const ELift& n) { freeVarsGo(n.body, bound, out); }
    void operator()(const EHole&) {}
    void operator()(const EQuote&) {}
    void branch(const PatPtr& p, const ExprPtr& body) {
      std::vector<std::string> added;
      for (const auto& v : patVars(p))
        if (bound.insert(v).second) added.push_back(v);
      freeVarsGo(body, bound, out);
      for (const auto& v : added) bound.erase(v);
    }
  };
  std::visit(V{bound, out}, e->node);
}

}  // namespace

std::set<std::string> freeVars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  freeVarsGo(e, bound, out);
  return out;
}

void collectHoles(const ExprPtr& e, std::vector<ExprPtr>& out) {
  struct V {
    const ExprPtr& e;
    std::vector<ExprPtr>& out;
    void operator()(const EVar&) {}
    void operator()(const ELam& n) { collectHoles(n.body, out); }
    void operator()(const EApp& n) {
      collectHoles(n.fn, out);
      collectHoles(n.arg, out);
    }
    void operator()(const ECon& n) {
      for (const auto& a : n.args) collectHoles(a, out);
    }
    void operator()(const ECase& n) {
      collectHoles(n.scrut, out);
      for (const auto& br : n.branches) collectHoles(br.body, out);
    }
    void operator()(const EBCon& n) {
      for (const auto& a : n.args) collectHoles(a, out);
    }
    void operator()(const EBCase& n) {
      collectHoles(n.scrut, out);
      for (const auto& br : n.branches) {
        collectHoles(br.body, out);
        if (br.exitCond) collectHoles(br.exitCond, out);
        if (br.recon) collectHoles(br.recon, out);
      }
    }
    void operator()(const ELift& n) { collectHoles(n.body, out); }
    void operator()(const EHole&) { out.push_back(e); }
    void operator()(const EQuote&) {}
  };
  std::visit(V{e, out}, e->node);
}

bool containsHole(const ExprPtr& e) {
  std::vector<ExprPtr> holes;
  collectHoles(e, holes);
  return !holes.empty();
}

ExprPtr fillHoles(const ExprPtr& e, const std::map<int, ExprPtr>& fills) {
  struct V {
    const ExprPtr& e;
    const std::map<int, ExprPtr>& fills;
    ExprPtr operator()(const EVar&) { return e; }
    ExprPtr operator()(const ELam& n) { return elam(n.binder, fillHoles(n.body, fills), e->pos); }
    ExprPtr operator()(const EApp& n) {
      return eapp(fillHoles(n.fn, fills), fillHoles(n.arg, fills), e->pos);
    }
    ExprPtr operator()(const ECon& n) {
      std::vector<ExprPtr> args;
      for (const auto& a : n.args) args.push_back(fillHoles(a, fills));
      return econ(n.con, std::move(args), e->pos);
    }
    ExprPtr operator()(const ECase& n) {
      std::vector<CaseBranch> bs;
      for (const auto& br : n.branches) bs.push_back({br.pat, fillHoles(br.body, fills)});
      return ecase(fillHoles(n.scrut, fills), std::move(bs), e->pos);
    }
    ExprPtr operator()(const EBCon& n) {
      std::vector<ExprPtr> args;
      for (const auto& a : n.args) args.push_back(fillHoles(a, fills));
      return ebcon(n.con, std::move(args), e->pos);
    }
    ExprPtr operator()(const EBCase& n) {
      std::vector<BCaseBranch> bs;
      for (const auto& br : n.branches) {
        bs.push_back({br.pat, fillHoles(br.body, fills),
                      br.exitCond ? fillHoles(br.exitCond, fills) : br.exitCond,
                      br.recon ? fillHoles(br.recon, fills) : br.recon});
      }
      return ebcase(fillHoles(n.scrut, fills), std::move(bs), e->pos);
    }
    ExprPtr operator()(const ELift& n) { return elift(fillHoles(n.body, fills), e->pos); }
    ExprPtr operator()(const EHole& n) {
      auto it = fills.find(n.info->id);
      return it == fills.end() ? e : it->second;
    }
    ExprPtr operator()(const EQuote&) { return e; }
  };
  return std::visit(V{e, fills}, e->node);
}

// --------------------------------------------------------------------------
// Values / residuals
// --------------------------------------------------------------------------

ValPtr vfo(FOPtr u) { return std::make_shared<Value>(Value{VFO{std::move(u)}}); }
ValPtr vclo(std::string binder, ExprPtr body) {
  return std::make_shared<Value>(Value{VClo{std::move(binder), std::move(body)}});
}
ValPtr vres(ResPtr r) { return std::make_shared<Value>(Value{VRes{std::move(r)}}); }

ResPtr rvar(std::string name) { return std::make_shared<Res>(Res{RVar{std::move(name)}}); }
ResPtr rbcon(std::string con, std::vector<ResPtr> args) {
  return std::make_shared<Res>(Res{RBCon{std::move(con), std::move(args)}});
}
ResPtr rbcase(ResPtr scrut, std::vector<RBranch> branches, int siteId) {
  return std::make_shared<Res>(Res{RBCase{std::move(scrut), std::move(branches), siteId}});
}
ResPtr rlift(FOPtr u) { return std::make_shared<Res>(Res{RLift{std::move(u)}}); }

std::set<std::string> resFreeVars(const ResPtr& r) {
  std::set<std::string> out;
  struct V {
    std::set<std::string>& out;
    void operator()(const RVar& n) { out.insert(n.name); }
    void operator()(const RBCon& n) {
      for (const auto& a : n.args)
        for (const auto& v : resFreeVars(a)) out.insert(v);
    }
    void operator()(const RBCase& n) {
      for (const auto& v : resFreeVars(n.scrut)) out.insert(v);
      for (const auto& br : n.branches) {
        auto fvs = freeVars(br.body);
        for (const auto& v : patVars(br.pat)) fvs.erase(v);
        out.insert(fvs.begin(), fvs.end());
      }
    }
    void operator()(const RLift&) {}
  };
  std::visit(V{out}, r->node);
  return out;
}

// --------------------------------------------------------------------------
// Traces
// --------------------------------------------------------------------------

TracePtr tEps() {
  static const TracePtr t = std::make_shared<Trace>(Trace{TEps{}});
  return t;
}
TracePtr tBr(TracePtr scrut, int branch, TracePtr body) {
  return std::make_shared<Trace>(Trace{TBr{std::move(scrut), branch, std::move(body)}});
}
TracePtr tTup(std::vector<TracePtr> parts) {
  return std::make_shared<Trace>(Trace{TTup{std::move(parts)}});
}

bool traceEq(const TracePtr& a, const TracePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<TEps>(a->node)) return true;
  if (auto* ba = std::get_if<TBr>(&a->node)) {
    const auto& bb = std::get<TBr>(b->node);
    return ba->branch == bb.branch && traceEq(ba->scrut, bb.scrut) && traceEq(ba->body, bb.body);
  }
  const auto& ta = std::get<TTup>(a->node);
  const auto& tb = std::get<TTup>(b->node);
  if (ta.parts.size() != tb.parts.size()) return false;
  for (size_t i = 0; i < ta.parts.size(); ++i)
    if (!traceEq(ta.parts[i], tb.parts[i])) return false;
  return true;
}

std::string showTrace(const TracePtr& t) {
  if (std::holds_alternative<TEps>(t->node)) return "eps";
  if (auto* b = std::get_if<TBr>(&t->node))
    return "Br(" + showTrace(b->scrut) + "," + std::to_string(b->branch) + "," +
           showTrace(b->body) + ")";
  const auto& tup = std::get<TTup>(t->node);
  std::string s = "[";
  for (size_t i = 0; i < tup.parts.size(); ++i) {
    if (i) s += ",";
    s += showTrace(tup.parts[i]);
  }
  return s + "]";
}

std::string showValueEnv(const ValueEnv& mu) {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : mu) {
    if (!first) s += ", ";
    first = false;
    s += k + " = " + showFO(v);
  }
  return s + "}";
}

// --------------------------------------------------------------------------
// Alpha-equivalence
// --------------------------------------------------------------------------

namespace {

bool valueAlphaEq(const ValPtr& a, const ValPtr& b, std::map<std::string, std::string>& ab,
                  std::map<std::string, std::string>& ba);

bool alphaEqGo(const ExprPtr& a, const ExprPtr& b, std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba) {
  if (a->node.index() != b->node.index()) return false;

  // Pair up variables from structurally matching patterns.
  auto bindPat = [&](const PatPtr& pa, const PatPtr& pb) -> bool {
    auto sa = patVars(pa);
    auto sb = patVars(pb);
    if (sa.size() != sb.size()) return false;
    // shape check: replace vars with a placeholder and compare
    std::function<bool(const PatPtr&, const PatPtr&)> shape = [&](const PatPtr& x,
                                                                  const PatPtr& y) -> bool {
      if (x->node.index() != y->node.index()) return false;
      if (std::holds_alternative<PVar>(x->node)) return true;
      const auto& cx = std::get<PCon>(x->node);
      const auto& cy = std::get<PCon>(y->node);
      if (cx.con != cy.con || cx.args.size() != cy.args.size()) return false;
      for (size_t i = 0; i < cx.args.size(); ++i)
        if (!shape(cx.args[i], cy.args[i])) return false;
      return true;
    };
    if (!shape(pa, pb)) return false;
    for (size_t i = 0; i < sa.size(); ++i) {
      ab[sa[i]] = sb[i];
      ba[sb[i]] = sa[i];
    }
    return true;
  };

  struct V {
    const ExprPtr& a;
    const ExprPtr& b;
    std::map<std::string, std::string>& ab;
    std::map<std::string, std::string>& ba;
    decltype(bindPat)& bind;

    bool scoped(std::function<bool()> f) {
      auto savedAb = ab;
      auto savedBa = ba;
      bool r = f();
      ab = std::move(savedAb);
      ba = std::move(savedBa);
      return r;
    }

    bool operator()(const EVar& na) {
      const auto& nb = std::get<EVar>(b->node);
      auto it = ab.find(na.name);
      if (it != ab.end()) return it->second == nb.name && ba.at(nb.name) == na.name;
      if (ba.count(nb.name)) return false;
      return na.name == nb.name;
    }
    bool operator()(const ELam& na) {
      const auto& nb = std::get<ELam>(b->node);
      return scoped([&] {
        ab[na.binder] = nb.binder;
        ba[nb.binder] = na.binder;
        return alphaEqGo(na.body, nb.body, ab, ba);
      });
    }
    bool operator()(const EApp& na) {
      const auto& nb = std::get<EApp>(b->node);
      return alphaEqGo(na.fn, nb.fn, ab, ba) && alphaEqGo(na.arg, nb.arg, ab, ba);
    }
    bool operator()(const ECon& na) {
      const auto& nb = std::get<ECon>(b->node);
      if (na.con != nb.con || na.args.size() != nb.args.size()) return false;
      for (size_t i = 0; i < na.args.size(); ++i)
        if (!alphaEqGo(na.args[i], nb.args[i], ab, ba)) return false;
      return true;
    }
    bool operator()(const ECase& na) {
      const auto& nb = std::get<ECase>(b->node);
      if (na.branches.size() != nb.branches.size()) return false;
      if (!alphaEqGo(na.scrut, nb.scrut, ab, ba)) return false;
      for (size_t i = 0; i < na.branches.size(); ++i) {
        const auto& bra = na.branches[i];
        const auto& brb = nb.branches[i];
        if (!scoped([&] {
              return bind(bra.pat, brb.pat) && alphaEqGo(bra.body, brb.body, ab, ba);
            }))
          return false;
      }
      return true;
    }
    bool operator()(const EBCon& na) {
      const auto& nb = std::get<EBCon>(b->node);
      if (na.con != nb.con || na.args.size() != nb.args.size()) return false;
      for (size_t i = 0; i < na.args.size(); ++i)
        if (!alphaEqGo(na.args[i], nb.args[i], ab, ba)) return false;
      return true;
    }
    bool operator()(const EBCase& na) {
      const auto& nb = std::get<EBCase>(b->node);
      if (na.branches.size() != nb.branches.size()) return false;
      if (!alphaEqGo(na.scrut, nb.scrut, ab, ba)) return false;
      for (size_t i = 0; i < na.branches.size(); ++i) {
        const auto& bra = na.branches[i];
        const auto& brb = nb.branches[i];
        bool bodyOk = scoped(
            [&] { return bind(bra.pat, brb.pat) && alphaEqGo(bra.body, brb.body, ab, ba); });
        if (!bodyOk) return false;
        if (!!bra.exitCond != !!brb.exitCond || !!bra.recon != !!brb.recon) return false;
        if (bra.exitCond && !alphaEqGo(bra.exitCond, brb.exitCond, ab, ba)) return false;
        if (bra.recon && !alphaEqGo(bra.recon, brb.recon, ab, ba)) return false;
      }
      return true;
    }
    bool operator()(const ELift& na) {
      return alphaEqGo(na.body, std::get<ELift>(b->node).body, ab, ba);
    }
    bool operator()(const EHole& na) {
      const auto& nb = std::get<EHole>(b->node);
      if (na.info->id != nb.info->id) return false;
      if (na.pending.size() != nb.pending.size()) return false;
      auto itb = nb.pending.begin();
      for (const auto& [k, v] : na.pending) {
        if (k != itb->first || !foEq(v, itb->second)) return false;
        ++itb;
      }
      return true;
    }
    bool operator()(const EQuote& na) {
      return valueAlphaEq(na.v, std::get<EQuote>(b->node).v, ab, ba);
    }
  };
  V v{a, b, ab, ba, bindPat};
  return std::visit(v, a->node);
}

bool resAlphaEq(const ResPtr& a, const ResPtr& b, std::map<std::string, std::string>& ab,
                std::map<std::string, std::string>& ba) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* va = std::get_if<RVar>(&a->node)) return va->name == std::get<RVar>(b->node).name;
  if (auto* ca = std::get_if<RBCon>(&a->node)) {
    const auto& cb = std::get<RBCon>(b->node);
    if (ca->con != cb.con || ca->args.size() != cb.args.size()) return false;
    for (size_t i = 0; i < ca->args.size(); ++i)
      if (!resAlphaEq(ca->args[i], cb.args[i], ab, ba)) return false;
    return true;
  }
  if (auto* la = std::get_if<RLift>(&a->node))
    return foEq(la->u, std::get<RLift>(b->node).u);
  const auto& xa = std::get<RBCase>(a->node);
  const auto& xb = std::get<RBCase>(b->node);
  if (xa.branches.size() != xb.branches.size()) return false;
  if (!resAlphaEq(xa.scrut, xb.scrut, ab, ba)) return false;
  for (size_t i = 0; i < xa.branches.size(); ++i) {
    const auto& bra = xa.branches[i];
    const auto& brb = xb.branches[i];
    if (!patEq(bra.pat, brb.pat)) return false;  // residual names are canonical
    if (!alphaEqGo(bra.body, brb.body, ab, ba)) return false;
    if (!valueAlphaEq(bra.exitCond, brb.exitCond, ab, ba)) return false;
    if (!valueAlphaEq(bra.recon, brb.recon, ab, ba)) return false;
  }
  return true;
}

bool valueAlphaEq(const ValPtr& a, const ValPtr& b, std::map<std::string, std::string>& ab,
                  std::map<std::string, std::string>& ba) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* fa = std::get_if<VFO>(&a->node)) return foEq(fa->u, std::get<VFO>(b->node).u);
  if (auto* ca = std::get_if<VClo>(&a->node)) {
    const auto& cb = std::get<VClo>(b->node);
    auto savedAb = ab;
    auto savedBa = ba;
    ab[ca->binder] = cb.binder;
    ba[cb.binder] = ca->binder;
    bool r = alphaEqGo(ca->body, cb.body, ab, ba);
    ab = std::move(savedAb);
    ba = std::move(savedBa);
    return r;
  }
  return resAlphaEq(std::get<VRes>(a->node).r, std::get<VRes>(b->node).r, ab, ba);
}

}  // namespace

bool alphaEq(const ExprPtr& a, const ExprPtr& b) {
  std::map<std::string, std::string> ab, ba;
  return alphaEqGo(a, b, ab, ba);
}

// --------------------------------------------------------------------------
// Fresh names
// --------------------------------------------------------------------------

std::string freshVar(const std::string& hint, const std::set<std::string>& avoid) {
  if (!avoid.count(hint)) return hint;
  for (int k = 0;; ++k) {
    std::string cand = hint + std::to_string(k);
    if (!avoid.count(cand)) return cand;
  }
}

}  // namespace bx
