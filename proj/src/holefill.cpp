#include "bx/holefill.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <utility>

#include "bx/typecheck.hpp"

namespace bx {

namespace {

using TEnv = std::map<std::string, TypePtr>;
using ShapeEnv = std::map<std::string, PatPtr>;

std::set<std::string> keysOf(const TEnv& env) {
  std::set<std::string> out;
  for (const auto& [k, v] : env) out.insert(k);
  return out;
}

bool mentionsBX(const TypePtr& t) {
  return std::visit(
      [](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TBX>) {
          return true;
        } else if constexpr (std::is_same_v<N, TFun>) {
          return mentionsBX(n.arg) || mentionsBX(n.result);
        } else {
          for (const auto& a : n.args)
            if (mentionsBX(a)) return true;
          return false;
        }
      },
      t->node);
}

// Does every value matching `q` also match `p`? Equal constructors recurse;
// a variable on the right matches anything, a variable on the left promises
// nothing.
bool patRefines(const PatPtr& q, const PatPtr& p) {
  if (std::holds_alternative<PVar>(p->node)) return true;
  if (std::holds_alternative<PVar>(q->node)) return false;
  const auto& qc = std::get<PCon>(q->node);
  const auto& pc = std::get<PCon>(p->node);
  if (qc.con != pc.con || qc.args.size() != pc.args.size()) return false;
  for (size_t i = 0; i < qc.args.size(); ++i)
    if (!patRefines(qc.args[i], pc.args[i])) return false;
  return true;
}

// Split x's signature into the arguments it needs to produce `target`.
// Only called for non-function targets, so the decomposition is unique.
std::optional<std::vector<TypePtr>> argsToProduce(const TypePtr& sig, const TypePtr& target) {
  std::vector<TypePtr> args;
  TypePtr rest = sig;
  while (!typeEq(rest, target)) {
    const auto* f = std::get_if<TFun>(&rest->node);
    if (f == nullptr) return std::nullopt;
    args.push_back(f->arg);
    rest = f->result;
  }
  return args;
}

// Fully applied signature: every arrow stripped.
std::pair<std::vector<TypePtr>, TypePtr> uncurrySig(const TypePtr& sig) {
  std::vector<TypePtr> args;
  TypePtr rest = sig;
  while (const auto* f = std::get_if<TFun>(&rest->node)) {
    args.push_back(f->arg);
    rest = f->result;
  }
  return {args, rest};
}

ExprPtr applySpine(const std::string& head, const std::vector<ExprPtr>& args) {
  ExprPtr e = evar(head);
  for (const auto& a : args) e = eapp(e, a);
  return e;
}

const PatPtr& anyShape() {
  static const PatPtr p = pvar("_shape");
  return p;
}

// Shared immutable inputs of one enumeration session.
struct EnumCtx {
  DataDeclTable dt;
  Weights w;
};
using CtxPtr = std::shared_ptr<const EnumCtx>;

SearchStream<ExprPtr> genU(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                           const PatPtr& shape, const TypePtr& t, int caseDepth);
SearchStream<ExprPtr> genV(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                           const PatPtr& shape, const TypePtr& t, int caseDepth);

// Product of per-argument streams, assembled through `build`.
SearchStream<ExprPtr> argsThen(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                               const std::vector<PatPtr>& shapes,
                               const std::vector<TypePtr>& types, int caseDepth,
                               std::function<ExprPtr(const std::vector<ExprPtr>&)> build) {
  std::vector<std::function<SearchStream<ExprPtr>()>> makers;
  for (size_t i = 0; i < types.size(); ++i) {
    PatPtr sh = i < shapes.size() ? shapes[i] : anyShape();
    TypePtr ty = types[i];
    makers.push_back([cx, env, known, sh, ty, caseDepth] {
      return genV(cx, env, known, sh, ty, caseDepth);
    });
  }
  return mapS(productS<ExprPtr>(makers), std::move(build));
}

// Non-empty subsets of {0..n-1}, in increasing (first-element, extension)
// order, costed at one branch weight per arm beyond the first.
SearchStream<std::vector<int>> armSets(int n, int from, long branchWeight) {
  return delayS<std::vector<int>>([n, from, branchWeight] {
    std::vector<Alternative<std::vector<int>>> alts;
    for (int j = from; j < n; ++j) {
      alts.push_back({0, [j] { return pureS(std::vector<int>{j}); }});
      if (j + 1 < n) {
        alts.push_back({branchWeight, [n, j, branchWeight] {
                          return mapS(armSets(n, j + 1, branchWeight),
                                      [j](const std::vector<int>& rest) {
                                        std::vector<int> out{j};
                                        out.insert(out.end(), rest.begin(), rest.end());
                                        return out;
                                      });
                        }});
      }
    }
    return choose(std::move(alts));
  });
}

// One case expression family: scrutinee `head V1 ... Vn`, arms over a
// non-empty subset of the scrutinee datatype's constructors in declaration
// order, bodies enumerated at the same shape with one less level of case
// nesting. Scrutinizing a bare variable teaches the arms its shape.
SearchStream<ExprPtr> genCaseOver(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                                  const PatPtr& shape, const TypePtr& t, int caseDepth,
                                  const std::string& head, const std::vector<TypePtr>& headArgs,
                                  const TypePtr& scrutTy) {
  const DataDecl* decl = cx->dt.find(std::get<TData>(scrutTy->node).name);
  int numCons = static_cast<int>(decl->constructors.size());
  auto scrutArgs = argsThen(cx, env, known, {}, headArgs, caseDepth,
                            [head](const std::vector<ExprPtr>& as) { return applySpine(head, as); });
  bool bareVar = headArgs.empty();
  return bindS(std::move(scrutArgs), [cx, env, known, shape, t, caseDepth, head, scrutTy, bareVar,
                                      numCons](const ExprPtr& scrut) {
    return bindS(armSets(numCons, 0, cx->w.branch),
                 [cx, env, known, shape, t, caseDepth, head, scrutTy, bareVar,
                  scrut](const std::vector<int>& arms) {
                   // Build the branch patterns once; bodies then come from a
                   // product of per-arm streams.
                   std::vector<PatPtr> pats;
                   std::vector<std::function<SearchStream<ExprPtr>()>> bodyMakers;
                   for (int ci : arms) {
                     const ConDecl& con =
                         cx->dt.find(std::get<TData>(scrutTy->node).name)->constructors[ci];
                     auto argTys = cx->dt.conArgTypes(con.name, scrutTy);
                     std::set<std::string> avoid = keysOf(env);
                     std::vector<PatPtr> vars;
                     TEnv env2 = env;
                     for (const auto& at : *argTys) {
                       std::string v = freshVar("w", avoid);
                       avoid.insert(v);
                       vars.push_back(pvar(v));
                       env2[v] = at;
                     }
                     PatPtr pat = pcon(con.name, vars);
                     ShapeEnv known2 = known;
                     if (bareVar) known2[head] = pat;
                     pats.push_back(pat);
                     bodyMakers.push_back([cx, env2, known2, shape, t, caseDepth] {
                       return genU(cx, env2, known2, shape, t, caseDepth - 1);
                     });
                   }
                   return mapS(productS<ExprPtr>(bodyMakers),
                               [scrut, pats](const std::vector<ExprPtr>& bodies) {
                                 std::vector<CaseBranch> bs;
                                 for (size_t i = 0; i < bodies.size(); ++i)
                                   bs.push_back({pats[i], bodies[i]});
                                 return ecase(scrut, bs);
                               });
                 });
  });
}

SearchStream<ExprPtr> genV(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                           const PatPtr& shape, const TypePtr& t, int caseDepth) {
  return delayS<ExprPtr>([cx, env, known, shape, t, caseDepth]() -> SearchStream<ExprPtr> {
    std::vector<Alternative<ExprPtr>> alts;
    bool shapeIsVar = std::holds_alternative<PVar>(shape->node);

    if (const auto* f = std::get_if<TFun>(&t->node)) {
      // Eta-long: a function-typed position is always a lambda. Shapes
      // describe first-order values, so a constructor shape produces nothing
      // here.
      if (shapeIsVar) {
        std::set<std::string> avoid = keysOf(env);
        std::string binder = freshVar("u", avoid);
        TEnv env2 = env;
        env2[binder] = f->arg;
        TypePtr bodyTy = f->result;
        alts.push_back({cx->w.lambda, [cx, env2, known, bodyTy, caseDepth, binder] {
                          return mapS(genU(cx, env2, known, anyShape(), bodyTy, caseDepth),
                                      [binder](const ExprPtr& b) { return elam(binder, b); });
                        }});
      }
      return choose(std::move(alts));
    }

    const auto* d = std::get_if<TData>(&t->node);
    if (d == nullptr) return emptyS<ExprPtr>();  // BX positions carry no unidirectional terms

    // Constructor applications. At a constructor shape only its own head is
    // allowed and the arguments inherit the sub-shapes; at a variable shape
    // every constructor of the datatype applies, in declaration order.
    if (const auto* pc = std::get_if<PCon>(&shape->node)) {
      auto argTys = cx->dt.conArgTypes(pc->con, t);
      if (argTys && argTys->size() == pc->args.size()) {
        std::string con = pc->con;
        std::vector<PatPtr> shapes = pc->args;
        std::vector<TypePtr> types = *argTys;
        alts.push_back({cx->w.con, [cx, env, known, shapes, types, caseDepth, con] {
                          return argsThen(cx, env, known, shapes, types, caseDepth,
                                          [con](const std::vector<ExprPtr>& as) {
                                            return econ(con, as);
                                          });
                        }});
      }
    } else if (const DataDecl* decl = cx->dt.find(d->name)) {
      for (const ConDecl& con : decl->constructors) {
        auto argTys = cx->dt.conArgTypes(con.name, t);
        std::string name = con.name;
        std::vector<TypePtr> types = *argTys;
        alts.push_back({cx->w.con, [cx, env, known, types, caseDepth, name] {
                          return argsThen(cx, env, known, {}, types, caseDepth,
                                          [name](const std::vector<ExprPtr>& as) {
                                            return econ(name, as);
                                          });
                        }});
      }
    }

    // Fully applied variables. At a constructor shape a bare variable is
    // usable only when an enclosing case arm pinned its shape down to one
    // refining the required one.
    for (const auto& [x, sig] : env) {
      auto args = argsToProduce(sig, t);
      if (!args) continue;
      if (!shapeIsVar) {
        auto it = known.find(x);
        bool ok = args->empty() && it != known.end() && patRefines(it->second, shape);
        if (!ok) continue;
      }
      std::string name = x;
      if (args->empty()) {
        alts.push_back({cx->w.var, [name] { return pureS(evar(name)); }});
      } else {
        std::vector<TypePtr> types = *args;
        alts.push_back({cx->w.component, [cx, env, known, types, caseDepth, name] {
                          return argsThen(cx, env, known, {}, types, caseDepth,
                                          [name](const std::vector<ExprPtr>& as) {
                                            return applySpine(name, as);
                                          });
                        }});
      }
    }
    return choose(std::move(alts));
  });
}

SearchStream<ExprPtr> genU(const CtxPtr& cx, const TEnv& env, const ShapeEnv& known,
                           const PatPtr& shape, const TypePtr& t, int caseDepth) {
  return delayS<ExprPtr>([cx, env, known, shape, t, caseDepth]() -> SearchStream<ExprPtr> {
    std::vector<Alternative<ExprPtr>> alts;
    alts.push_back(
        {0, [cx, env, known, shape, t, caseDepth] { return genV(cx, env, known, shape, t, caseDepth); }});
    // Cases appear only at non-function types (a function position is under
    // its lambda already) and only while the nesting budget lasts.
    if (caseDepth > 0 && !std::holds_alternative<TFun>(t->node)) {
      for (const auto& [x, sig] : env) {
        auto [headArgs, result] = uncurrySig(sig);
        const auto* rd = std::get_if<TData>(&result->node);
        if (rd == nullptr || cx->dt.find(rd->name) == nullptr) continue;
        long scrutWeight = headArgs.empty() ? cx->w.var : cx->w.component;
        std::string head = x;
        std::vector<TypePtr> argTys = headArgs;
        TypePtr scrutTy = result;
        alts.push_back({cx->w.caseExpr + scrutWeight,
                        [cx, env, known, shape, t, caseDepth, head, argTys, scrutTy] {
                          return genCaseOver(cx, env, known, shape, t, caseDepth, head, argTys,
                                             scrutTy);
                        }});
      }
    }
    return choose(std::move(alts));
  });
}

}  // namespace

PatPtr shapePattern(const ExprPtr& e, std::set<std::string>& avoid) {
  if (const auto* lift = std::get_if<ELift>(&e->node)) return shapePattern(lift->body, avoid);
  const std::string* con = nullptr;
  const std::vector<ExprPtr>* args = nullptr;
  if (const auto* c = std::get_if<ECon>(&e->node)) {
    con = &c->con;
    args = &c->args;
  } else if (const auto* bc = std::get_if<EBCon>(&e->node)) {
    con = &bc->con;
    args = &bc->args;
  }
  if (con == nullptr) {
    std::string v = freshVar("z", avoid);
    avoid.insert(v);
    return pvar(v);
  }
  std::vector<PatPtr> sub;
  for (const auto& a : *args) sub.push_back(shapePattern(a, avoid));
  return pcon(*con, sub);
}

ExprPtr patternToExpr(const PatPtr& p) {
  if (const auto* pc = std::get_if<PCon>(&p->node)) {
    std::vector<ExprPtr> args;
    for (const auto& a : pc->args) args.push_back(patternToExpr(a));
    return econ(pc->con, args);
  }
  throw BxError("patternToExpr: pattern has variables");
}

bool patternsOverlap(const PatPtr& a, const PatPtr& b) {
  if (std::holds_alternative<PVar>(a->node) || std::holds_alternative<PVar>(b->node)) return true;
  const auto& ac = std::get<PCon>(a->node);
  const auto& bc = std::get<PCon>(b->node);
  if (ac.con != bc.con || ac.args.size() != bc.args.size()) return false;
  for (size_t i = 0; i < ac.args.size(); ++i)
    if (!patternsOverlap(ac.args[i], bc.args[i])) return false;
  return true;
}

bool patternsPairwiseDisjoint(const std::vector<PatPtr>& ps) {
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = i + 1; j < ps.size(); ++j)
      if (patternsOverlap(ps[i], ps[j])) return false;
  return true;
}

ExprPtr completeExitHole(const DataDeclTable& dt, const HoleInfo& h, int& nextId) {
  const auto& fn = std::get<TFun>(h.targetType->node);
  const TypePtr& sigma = fn.arg;
  std::set<std::string> avoid;
  for (const auto& [k, ty] : h.envUni) avoid.insert(k);
  std::string v = freshVar("v", avoid);
  avoid.insert(v);
  PatPtr pe = shapePattern(h.branchBody, avoid);
  auto binds = checkPattern(dt, pe, sigma);

  auto inner = std::make_shared<HoleInfo>();
  inner->id = nextId++;
  inner->kind = HoleKind::Generic;
  inner->targetType = tBool();
  inner->envUni = h.envUni;
  inner->envUni[v] = sigma;
  for (const auto& [x, ty] : binds) inner->envUni[x] = ty;
  inner->branchBody = h.branchBody;
  inner->branchPattern = pe;

  std::vector<CaseBranch> arms;
  arms.push_back({pe, ehole(inner)});
  if (!patIsBareVar(pe)) arms.push_back({pvar(freshVar("w", avoid)), econ("False")});
  return elam(v, ecase(evar(v), arms));
}

ExprPtr completeReconHole(const DataDeclTable& dt, const HoleInfo& h, int& nextId) {
  const auto& fn = std::get<TFun>(h.targetType->node);
  const TypePtr& sigma0 = fn.arg;
  const auto& fn2 = std::get<TFun>(fn.result->node);
  const TypePtr& sigma = fn2.arg;

  std::set<std::string> avoid;
  for (const auto& [k, ty] : h.envUni) avoid.insert(k);
  std::string s = freshVar("s", avoid);
  avoid.insert(s);
  std::string v = freshVar("v", avoid);
  avoid.insert(v);

  if (patVars(h.branchPattern).empty())
    return elam(s, elam(v, patternToExpr(h.branchPattern)));

  PatPtr pe = shapePattern(h.branchBody, avoid);
  auto binds = checkPattern(dt, pe, sigma);

  auto inner = std::make_shared<HoleInfo>();
  inner->id = nextId++;
  inner->kind = HoleKind::Shape;
  inner->targetType = sigma0;
  inner->envUni = h.envUni;
  inner->envUni[s] = sigma0;
  inner->envUni[v] = sigma;
  for (const auto& [x, ty] : binds) inner->envUni[x] = ty;
  inner->branchBody = h.branchBody;
  inner->branchPattern = h.branchPattern;

  return elam(s, elam(v, ecase(evar(v), {{pe, ehole(inner)}})));
}

ExprPtr exitAlwaysTrue() { return elam("v", econ("True")); }

ExprPtr reconKeepSource() { return elam("s", elam("v", evar("s"))); }

std::map<std::string, TypePtr> enumerationEnv(const std::map<std::string, TypePtr>& envUni) {
  TEnv out;
  for (const auto& [x, ty] : envUni) {
    TypePtr t = ty;
    if (const auto* bx = std::get_if<TBX>(&t->node)) t = bx->inner;
    if (mentionsBX(t)) continue;
    out[x] = t;
  }
  return out;
}

std::map<std::string, TypePtr> boolAtomHeads(const std::map<std::string, TypePtr>& env) {
  TEnv out;
  for (const auto& [x, ty] : env) {
    if (x == "not" || x == "and" || x == "or") continue;
    auto [args, result] = uncurrySig(ty);
    if (typeEq(result, tBool())) out[x] = ty;
  }
  return out;
}

SearchStream<ExprPtr> enumerateShaped(const DataDeclTable& dt,
                                      const std::map<std::string, TypePtr>& env,
                                      const PatPtr& shape, const TypePtr& t, const Weights& w,
                                      int caseDepth) {
  auto cx = std::make_shared<const EnumCtx>(EnumCtx{dt, w});
  return genU(cx, enumerationEnv(env), {}, shape, t, caseDepth);
}

namespace {

bool envBindsAt(const TEnv& env, const std::string& name, const TypePtr& t) {
  auto it = env.find(name);
  return it != env.end() && typeEq(it->second, t);
}

ExprPtr apply2(const std::string& fn, const ExprPtr& a, const ExprPtr& b) {
  return eapp(eapp(evar(fn), a), b);
}

// Conjunctions of 1..room literals, tracking literal count in the value.
SearchStream<std::pair<ExprPtr, int>> conjStream(
    const CtxPtr& cx, const std::function<SearchStream<ExprPtr>()>& literals, bool hasAnd,
    int room) {
  return bindS(literals(), [cx, literals, hasAnd, room](const ExprPtr& l) {
    std::vector<Alternative<std::pair<ExprPtr, int>>> alts;
    alts.push_back({0, [l] { return pureS(std::make_pair(l, 1)); }});
    if (hasAnd && room >= 2) {
      alts.push_back({cx->w.app, [cx, literals, hasAnd, room, l] {
                        return mapS(conjStream(cx, literals, hasAnd, room - 1),
                                    [l](const std::pair<ExprPtr, int>& rest) {
                                      return std::make_pair(apply2("and", l, rest.first),
                                                            rest.second + 1);
                                    });
                      }});
    }
    return choose(std::move(alts));
  });
}

SearchStream<ExprPtr> disjStream(const CtxPtr& cx,
                                 const std::function<SearchStream<ExprPtr>()>& literals,
                                 bool hasAnd, bool hasOr, int room) {
  return bindS(conjStream(cx, literals, hasAnd, room),
               [cx, literals, hasAnd, hasOr, room](const std::pair<ExprPtr, int>& c) {
                 std::vector<Alternative<ExprPtr>> alts;
                 ExprPtr head = c.first;
                 alts.push_back({0, [head] { return pureS(head); }});
                 int left = room - c.second;
                 if (hasOr && left >= 1) {
                   alts.push_back({cx->w.app, [cx, literals, hasAnd, hasOr, left, head] {
                                     return mapS(disjStream(cx, literals, hasAnd, hasOr, left),
                                                 [head](const ExprPtr& rest) {
                                                   return apply2("or", head, rest);
                                                 });
                                   }});
                 }
                 return choose(std::move(alts));
               });
}

}  // namespace

SearchStream<ExprPtr> enumerateBoolDNF(const DataDeclTable& dt,
                                       const std::map<std::string, TypePtr>& env,
                                       const std::map<std::string, TypePtr>& atoms,
                                       const Weights& w, int maxAtoms) {
  auto cx = std::make_shared<const EnumCtx>(EnumCtx{dt, w});
  TEnv cleanEnv = enumerationEnv(env);
  TEnv cleanAtoms = enumerationEnv(atoms);
  bool hasNot = envBindsAt(cleanEnv, "not", funType(tBool(), tBool()));
  bool hasAnd = envBindsAt(cleanEnv, "and", funType(tBool(), funType(tBool(), tBool())));
  bool hasOr = envBindsAt(cleanEnv, "or", funType(tBool(), funType(tBool(), tBool())));

  // The connectives belong to the formula layer; atom arguments are plain
  // value terms and must not rebuild boolean structure underneath an atom.
  TEnv argEnv = cleanEnv;
  if (hasNot) argEnv.erase("not");
  if (hasAnd) argEnv.erase("and");
  if (hasOr) argEnv.erase("or");

  // One literal: an atom `x V1 ... Vn`, positive or negated.
  auto literals = [cx, argEnv, cleanAtoms, hasNot]() -> SearchStream<ExprPtr> {
    std::vector<Alternative<ExprPtr>> alts;
    for (const auto& [x, sig] : cleanAtoms) {
      auto [args, result] = uncurrySig(sig);
      if (!typeEq(result, tBool())) continue;
      std::string name = x;
      std::vector<TypePtr> types = args;
      long atomWeight = types.empty() ? cx->w.var : cx->w.component;
      auto makeAtom = [cx, argEnv, types, name]() -> SearchStream<ExprPtr> {
        if (types.empty()) return pureS(evar(name));
        return argsThen(cx, argEnv, {}, {}, types, 0,
                        [name](const std::vector<ExprPtr>& as) { return applySpine(name, as); });
      };
      alts.push_back({atomWeight, makeAtom});
      if (hasNot) {
        alts.push_back({atomWeight + cx->w.app, [makeAtom] {
                          return mapS(makeAtom(),
                                      [](const ExprPtr& a) { return eapp(evar("not"), a); });
                        }});
      }
    }
    return choose(std::move(alts));
  };

  std::vector<Alternative<ExprPtr>> top;
  top.push_back({w.boolConst, [] { return pureS(econ("True")); }});
  top.push_back({w.boolConst, [] { return pureS(econ("False")); }});
  if (maxAtoms >= 1 && !cleanAtoms.empty()) {
    int room = maxAtoms;
    top.push_back(
        {0, [cx, literals, hasAnd, hasOr, room] { return disjStream(cx, literals, hasAnd, hasOr, room); }});
  }
  return choose(std::move(top));
}

}  // namespace bx
