#include "bx/sketchgen.hpp"

#include <algorithm>

#include "bx/typecheck.hpp"

namespace bx {

namespace {

using TEnv = std::map<std::string, TypePtr>;

TEnv withBinding(TEnv base, const std::string& name, const TypePtr& t) {
  base[name] = t;
  return base;
}

TEnv withBindings(TEnv base, const TEnv& add) {
  for (const auto& [k, v] : add) base[k] = v;
  return base;
}

TEnv withoutKeys(TEnv base, const TEnv& drop) {
  for (const auto& [k, v] : drop) {
    (void)v;
    base.erase(k);
  }
  return base;
}

}  // namespace

// ---------------------------------------------------------------------------
// genType
// ---------------------------------------------------------------------------

SearchStream<TypePtr> genType(const TypePtr& a, const Weights& w) {
  if (const auto* f = std::get_if<TFun>(&a->node)) {
    TypePtr argT = f->arg;
    TypePtr resT = f->result;
    return bindS(genType(argT, w), [resT, w](const TypePtr& a2) {
      return mapS(genType(resT, w),
                  [a2](const TypePtr& r2) { return funType(a2, r2); });
    });
  }
  if (std::get_if<TBX>(&a->node)) return pureS(a);
  const auto* d = std::get_if<TData>(&a->node);
  std::vector<std::function<SearchStream<TypePtr>()>> makers;
  for (const TypePtr& arg : d->args) {
    makers.push_back([arg, w] { return genType(arg, w); });
  }
  std::string name = d->name;
  long bxw = w.bxWrap;
  return bindS(productS<TypePtr>(std::move(makers)),
               [name, bxw](const std::vector<TypePtr>& args) {
                 TypePtr t0 = dataType(name, args);
                 std::vector<Alternative<TypePtr>> alts;
                 alts.push_back({0, [t0] { return pureS(t0); }});
                 if (isFirstOrder(t0)) {
                   alts.push_back({bxw, [t0] { return pureS(bxType(t0)); }});
                 }
                 return choose(std::move(alts));
               });
}

long genTypeCount(const TypePtr& a) {
  if (const auto* f = std::get_if<TFun>(&a->node)) {
    return genTypeCount(f->arg) * genTypeCount(f->result);
  }
  if (std::get_if<TBX>(&a->node)) return 1;
  const auto* d = std::get_if<TData>(&a->node);
  long combos = 1;
  for (const TypePtr& arg : d->args) combos *= genTypeCount(arg);
  return combos + (isFirstOrder(a) ? 1 : 0);
}

// ---------------------------------------------------------------------------
// genEnv
// ---------------------------------------------------------------------------

std::vector<std::string> reachableDefs(const SynthesisInput& in) {
  std::map<std::string, ExprPtr> bodies;
  for (const Definition& d : in.program) bodies[d.name] = d.body;
  std::set<std::string> reach;
  std::vector<std::string> work;
  for (const std::string& x : freeVars(in.entry)) {
    if (bodies.count(x)) work.push_back(x);
  }
  while (!work.empty()) {
    std::string f = work.back();
    work.pop_back();
    if (!reach.insert(f).second) continue;
    for (const std::string& x : freeVars(bodies.at(f))) {
      if (bodies.count(x) && !reach.count(x)) work.push_back(x);
    }
  }
  std::vector<std::string> out;
  for (const Definition& d : in.program) {
    if (reach.count(d.name)) out.push_back(d.name);
  }
  return out;
}

SearchStream<EnvCandidate> genEnv(const SynthesisInput& in, const Weights& w) {
  TypePtr entryTy;
  try {
    entryTy = inferExpr(in.datatypes, TypeEnvs{in.typingEnv, {}}, in.entry);
  } catch (const BxError&) {
    return emptyS<EnvCandidate>();
  }
  const auto* f = std::get_if<TFun>(&entryTy->node);
  if (!f || !isFirstOrder(f->arg) || !isFirstOrder(f->result)) {
    return emptyS<EnvCandidate>();
  }
  TypePtr target = funType(bxType(f->arg), bxType(f->result));

  std::vector<std::string> names = reachableDefs(in);
  std::vector<std::function<SearchStream<TypePtr>()>> makers;
  for (const std::string& name : names) {
    TypePtr orig = in.typingEnv.at(name);
    makers.push_back([orig, w] { return genType(orig, w); });
  }
  DataDeclTable dt = in.datatypes;
  TEnv baseEnv = in.typingEnv;
  ExprPtr entry = in.entry;
  return bindS(
      productS<TypePtr>(std::move(makers)),
      [dt, baseEnv, entry, target, names](const std::vector<TypePtr>& tys)
          -> SearchStream<EnvCandidate> {
        TEnv env = baseEnv;
        for (size_t i = 0; i < names.size(); ++i) env[names[i]] = tys[i];
        try {
          checkExpr(dt, TypeEnvs{env, {}}, entry, target);
        } catch (const BxError&) {
          return emptyS<EnvCandidate>();
        }
        return pureS(EnvCandidate{std::move(env), target});
      });
}

// ---------------------------------------------------------------------------
// genSketch
// ---------------------------------------------------------------------------

SearchStream<ExprPtr> genSketch(const DataDeclTable& datatypes, const TEnv& gammaP,
                                const TEnv& deltaP, const TypePtr& target,
                                const TEnv& gamma, const ExprPtr& e,
                                const TypePtr& source, const Weights& w,
                                const std::shared_ptr<int>& holeIds) {
  // Copies for capture: every alternative thunk may be forced much later.
  const DataDeclTable dt = datatypes;
  std::vector<Alternative<ExprPtr>> alts;

  const auto* targetBX = std::get_if<TBX>(&target->node);
  const bool liftable = targetBX && typeEq(targetBX->inner, source);

  if (const auto* v = std::get_if<EVar>(&e->node)) {
    const std::string x = v->name;
    auto gi = gamma.find(x);
    if (gi != gamma.end() && typeEq(gi->second, source)) {
      // Bidirectional variable first when the target demands BX.
      if (liftable) {
        auto di = deltaP.find(x);
        if (di != deltaP.end() && typeEq(di->second, targetBX->inner)) {
          alts.push_back({w.var, [x] { return pureS(evar(x)); }});
        }
      }
      auto pi = gammaP.find(x);
      if (pi != gammaP.end() && typeEq(pi->second, target)) {
        alts.push_back({w.var, [x] { return pureS(evar(x)); }});
      }
    }
  } else if (const auto* lam = std::get_if<ELam>(&e->node)) {
    const auto* tf = std::get_if<TFun>(&target->node);
    const auto* sf = std::get_if<TFun>(&source->node);
    if (tf && sf) {
      const std::string x = lam->binder;
      TEnv gamma2 = withBinding(gamma, x, sf->arg);
      TEnv gammaP2 = withBinding(gammaP, x, tf->arg);
      TEnv deltaP2 = deltaP;
      deltaP2.erase(x);
      ExprPtr body = lam->body;
      TypePtr tres = tf->result;
      TypePtr sres = sf->result;
      alts.push_back(
          {w.lambda, [dt, gammaP2, deltaP2, tres, gamma2, body, sres, w, holeIds, x] {
             return mapS(
                 genSketch(dt, gammaP2, deltaP2, tres, gamma2, body, sres, w, holeIds),
                 [x](const ExprPtr& b) { return elam(x, b); });
           }});
    }
  } else if (const auto* app = std::get_if<EApp>(&e->node)) {
    // Argument type from the head: e1 : A2 -> source.
    TypePtr headTy;
    try {
      headTy = inferExpr(dt, TypeEnvs{gamma, {}}, app->fn);
    } catch (const BxError&) {
    }
    const auto* hf = headTy ? std::get_if<TFun>(&headTy->node) : nullptr;
    if (hf && typeEq(hf->result, source)) {
      TypePtr a2 = hf->arg;
      ExprPtr fn = app->fn;
      ExprPtr arg = app->arg;
      TEnv gP = gammaP, dP = deltaP, g = gamma;
      TypePtr tgt = target, src = source;
      alts.push_back({w.app, [dt, gP, dP, tgt, g, fn, arg, a2, src, w, holeIds] {
                        return bindS(
                            genType(a2, w),
                            [dt, gP, dP, tgt, g, fn, arg, a2, src, w,
                             holeIds](const TypePtr& b2) {
                              return bindS(
                                  genSketch(dt, gP, dP, funType(b2, tgt), g, fn,
                                            funType(a2, src), w, holeIds),
                                  [dt, gP, dP, g, arg, a2, b2, w,
                                   holeIds](const ExprPtr& f2) {
                                    return mapS(genSketch(dt, gP, dP, b2, g, arg, a2,
                                                          w, holeIds),
                                                [f2](const ExprPtr& x2) {
                                                  return eapp(f2, x2);
                                                });
                                  });
                            });
                      }});
    }
  } else if (const auto* con = std::get_if<ECon>(&e->node)) {
    const std::string c = con->con;
    const std::vector<ExprPtr> args = con->args;
    // Bidirectional constructor first.
    if (liftable) {
      auto ats = dt.conArgTypes(c, targetBX->inner);
      if (ats && ats->size() == args.size()) {
        std::vector<std::function<SearchStream<ExprPtr>()>> makers;
        bool ok = true;
        for (size_t i = 0; i < args.size(); ++i) {
          TypePtr ti = (*ats)[i];
          if (!isFirstOrder(ti)) {
            ok = false;
            break;
          }
          ExprPtr ai = args[i];
          TEnv gP = gammaP, dP = deltaP, g = gamma;
          makers.push_back([dt, gP, dP, ti, g, ai, w, holeIds] {
            return genSketch(dt, gP, dP, bxType(ti), g, ai, ti, w, holeIds);
          });
        }
        if (ok) {
          alts.push_back({w.con, [makers, c] {
                            return mapS(productS<ExprPtr>(makers),
                                        [c](const std::vector<ExprPtr>& as) {
                                          return ebcon(c, as);
                                        });
                          }});
        }
      }
    }
    // Unidirectional constructor: target must equal the source type exactly.
    if (typeEq(target, source)) {
      auto ats = dt.conArgTypes(c, source);
      if (ats && ats->size() == args.size()) {
        std::vector<std::function<SearchStream<ExprPtr>()>> makers;
        for (size_t i = 0; i < args.size(); ++i) {
          TypePtr ti = (*ats)[i];
          ExprPtr ai = args[i];
          TEnv gP = gammaP, dP = deltaP, g = gamma;
          makers.push_back([dt, gP, dP, ti, g, ai, w, holeIds] {
            return genSketch(dt, gP, dP, ti, g, ai, ti, w, holeIds);
          });
        }
        alts.push_back({w.con, [makers, c] {
                          return mapS(productS<ExprPtr>(makers),
                                      [c](const std::vector<ExprPtr>& as) {
                                        return econ(c, as);
                                      });
                        }});
      }
    }
  } else if (const auto* cas = std::get_if<ECase>(&e->node)) {
    TypePtr scrutTy;
    try {
      scrutTy = inferExpr(dt, TypeEnvs{gamma, {}}, cas->scrut);
    } catch (const BxError&) {
    }
    if (scrutTy) {
      const ExprPtr scrut = cas->scrut;
      const std::vector<CaseBranch> branches = cas->branches;
      const long caseCost =
          w.caseExpr + w.branch * static_cast<long>(branches.size() > 1
                                                        ? branches.size() - 1
                                                        : 0);

      // Bidirectional case: target BX sigma, scrutinee BX sigma0; pattern
      // variables go to the bidirectional environment; exit/reconciliation
      // slots become holes that see only gammaP.
      if (targetBX && typeEq(targetBX->inner, source) && isFirstOrder(scrutTy)) {
        TypePtr sigma = targetBX->inner;
        TypePtr sigma0 = scrutTy;
        bool patsOk = true;
        std::vector<TEnv> patBinds;
        for (const CaseBranch& br : branches) {
          try {
            patBinds.push_back(checkPattern(dt, br.pat, sigma0));
          } catch (const BxError&) {
            patsOk = false;
            break;
          }
        }
        if (patsOk) {
          TEnv gP = gammaP, dP = deltaP, g = gamma;
          TypePtr tgt = target;
          TypePtr src = source;
          Weights wc = w;
          alts.push_back(
              {caseCost,
               [dt, gP, dP, tgt, g, scrut, branches, patBinds, sigma, sigma0, src,
                wc, holeIds] {
                 auto scrutStream = genSketch(dt, gP, dP, bxType(sigma0), g, scrut,
                                              sigma0, wc, holeIds);
                 return bindS(
                     scrutStream,
                     [dt, gP, dP, tgt, g, branches, patBinds, sigma, sigma0, wc,
                      holeIds](const ExprPtr& scrut2) {
                       std::vector<std::function<SearchStream<ExprPtr>()>> makers;
                       for (size_t i = 0; i < branches.size(); ++i) {
                         TEnv g2 = withBindings(g, patBinds[i]);
                         TEnv dP2 = withBindings(dP, patBinds[i]);
                         TEnv gP2 = withoutKeys(gP, patBinds[i]);
                         ExprPtr body = branches[i].body;
                         auto inner = std::get_if<TBX>(&tgt->node)->inner;
                         makers.push_back([dt, gP2, dP2, tgt, g2, body, inner, wc,
                                           holeIds] {
                           return genSketch(dt, gP2, dP2, tgt, g2, body, inner, wc,
                                            holeIds);
                         });
                       }
                       return mapS(
                           productS<ExprPtr>(makers),
                           [scrut2, gP, branches, sigma, sigma0,
                            holeIds](const std::vector<ExprPtr>& bodies) {
                             std::vector<BCaseBranch> out;
                             for (size_t i = 0; i < branches.size(); ++i) {
                               auto exitInfo = std::make_shared<HoleInfo>(HoleInfo{
                                   (*holeIds)++, HoleKind::Exit,
                                   funType(sigma, tBool()), gP, bodies[i],
                                   branches[i].pat});
                               auto reconInfo = std::make_shared<HoleInfo>(HoleInfo{
                                   (*holeIds)++, HoleKind::Recon,
                                   funType(sigma0, funType(sigma, sigma0)), gP,
                                   bodies[i], branches[i].pat});
                               out.push_back(BCaseBranch{branches[i].pat, bodies[i],
                                                         ehole(exitInfo),
                                                         ehole(reconInfo)});
                             }
                             return ebcase(scrut2, out);
                           });
                     });
               }});
        }
      }

      // Unidirectional case at an arbitrary target; the scrutinee type may
      // itself be rewritten (A0 leads-to A0').
      {
        TypePtr a0 = scrutTy;
        std::vector<TEnv> bindsO;
        bool okO = true;
        for (const CaseBranch& br : branches) {
          try {
            bindsO.push_back(checkPattern(dt, br.pat, a0));
          } catch (const BxError&) {
            okO = false;
            break;
          }
        }
        if (okO) {
          TEnv gP = gammaP, dP = deltaP, g = gamma;
          TypePtr tgt = target;
          TypePtr src = source;
          Weights wc = w;
          alts.push_back(
              {caseCost, [dt, gP, dP, tgt, g, scrut, branches, bindsO, a0, src, wc,
                          holeIds] {
                 return bindS(
                     genType(a0, wc),
                     [dt, gP, dP, tgt, g, scrut, branches, bindsO, a0, src, wc,
                      holeIds](const TypePtr& a0p) -> SearchStream<ExprPtr> {
                       std::vector<TEnv> bindsP;
                       for (const CaseBranch& br : branches) {
                         try {
                           bindsP.push_back(checkPattern(dt, br.pat, a0p));
                         } catch (const BxError&) {
                           return emptyS<ExprPtr>();
                         }
                       }
                       auto scrutStream =
                           genSketch(dt, gP, dP, a0p, g, scrut, a0, wc, holeIds);
                       return bindS(
                           scrutStream,
                           [dt, gP, dP, tgt, g, branches, bindsO, bindsP, src, wc,
                            holeIds](const ExprPtr& scrut2) {
                             std::vector<std::function<SearchStream<ExprPtr>()>>
                                 makers;
                             for (size_t i = 0; i < branches.size(); ++i) {
                               TEnv g2 = withBindings(g, bindsO[i]);
                               TEnv gP2 = withBindings(gP, bindsP[i]);
                               TEnv dP2 = withoutKeys(dP, bindsP[i]);
                               ExprPtr body = branches[i].body;
                               makers.push_back(
                                   [dt, gP2, dP2, tgt, g2, body, src, wc, holeIds] {
                                     return genSketch(dt, gP2, dP2, tgt, g2, body,
                                                      src, wc, holeIds);
                                   });
                             }
                             return mapS(
                                 productS<ExprPtr>(makers),
                                 [scrut2,
                                  branches](const std::vector<ExprPtr>& bodies) {
                                   std::vector<CaseBranch> out;
                                   for (size_t i = 0; i < branches.size(); ++i) {
                                     out.push_back(
                                         CaseBranch{branches[i].pat, bodies[i]});
                                   }
                                   return ecase(scrut2, out);
                                 });
                           });
                     });
               }});
        }
      }
    }
  }
  // Lift: generate the term unidirectionally at the unwrapped type. Weighted
  // above the direct bidirectional alternatives, hence appended last.
  if (liftable) {
    TEnv gP = gammaP, dP = deltaP, g = gamma;
    TypePtr inner = targetBX->inner;
    ExprPtr e2 = e;
    TypePtr src = source;
    alts.push_back({w.lift, [dt, gP, dP, inner, g, e2, src, w, holeIds] {
                      return mapS(genSketch(dt, gP, dP, inner, g, e2, src, w, holeIds),
                                  [](const ExprPtr& b) { return elift(b); });
                    }});
  }
  return choose(std::move(alts));
}

// ---------------------------------------------------------------------------
// Whole-program sketches
// ---------------------------------------------------------------------------

SearchStream<ProgramSketch> genProgramSketches(const SynthesisInput& in,
                                               const Weights& w) {
  const DataDeclTable dt = in.datatypes;
  const TEnv baseEnv = in.typingEnv;
  const std::vector<Definition> program = in.program;
  const std::vector<std::string> names = reachableDefs(in);
  std::map<std::string, ExprPtr> bodies;
  for (const Definition& d : in.program) bodies[d.name] = d.body;

  return bindS(genEnv(in, w), [dt, baseEnv, program, names, bodies,
                               w](const EnvCandidate& cand) {
    auto holeIds = std::make_shared<int>(0);
    std::vector<std::function<SearchStream<ExprPtr>()>> makers;
    for (const std::string& name : names) {
      ExprPtr body = bodies.at(name);
      TypePtr src = baseEnv.at(name);
      TypePtr tgt = cand.env.at(name);
      TEnv env = cand.env;
      makers.push_back([dt, env, tgt, baseEnv, body, src, w, holeIds] {
        return genSketch(dt, env, TEnv{}, tgt, baseEnv, body, src, w, holeIds);
      });
    }
    TEnv envC = cand.env;
    TypePtr entryType = cand.entryType;
    return mapS(productS<ExprPtr>(std::move(makers)),
                [program, names, envC, entryType](const std::vector<ExprPtr>& bs) {
                  std::vector<Definition> defs = program;
                  for (size_t i = 0; i < names.size(); ++i) {
                    for (Definition& d : defs) {
                      if (d.name == names[i]) d.body = bs[i];
                    }
                  }
                  return ProgramSketch{envC, entryType, std::move(defs)};
                });
  });
}

// ---------------------------------------------------------------------------
// canonicalFill
// ---------------------------------------------------------------------------

ExprPtr canonicalFill(const ExprPtr& e) {
  struct V {
    ExprPtr operator()(const EVar&) const { return src; }
    ExprPtr operator()(const ELam& n) const {
      return elam(n.binder, canonicalFill(n.body));
    }
    ExprPtr operator()(const EApp& n) const {
      return eapp(canonicalFill(n.fn), canonicalFill(n.arg));
    }
    ExprPtr operator()(const ECon& n) const {
      std::vector<ExprPtr> as;
      for (const auto& a : n.args) as.push_back(canonicalFill(a));
      return econ(n.con, as);
    }
    ExprPtr operator()(const ECase& n) const {
      std::vector<CaseBranch> bs;
      for (const auto& b : n.branches) bs.push_back({b.pat, canonicalFill(b.body)});
      return ecase(canonicalFill(n.scrut), bs);
    }
    ExprPtr operator()(const EBCon& n) const {
      std::vector<ExprPtr> as;
      for (const auto& a : n.args) as.push_back(canonicalFill(a));
      return ebcon(n.con, as);
    }
    ExprPtr operator()(const EBCase& n) const {
      std::vector<BCaseBranch> bs;
      for (const auto& b : n.branches) {
        bs.push_back({b.pat, canonicalFill(b.body), canonicalFill(b.exitCond),
                      canonicalFill(b.recon)});
      }
      return ebcase(canonicalFill(n.scrut), bs);
    }
    ExprPtr operator()(const ELift& n) const { return elift(canonicalFill(n.body)); }
    ExprPtr operator()(const EHole& n) const {
      if (n.info->kind == HoleKind::Exit) {
        return elam("cf_s", econ("True"));
      }
      if (n.info->kind == HoleKind::Recon) {
        return elam("cf_s", elam("cf_v", evar("cf_s")));
      }
      return src;
    }
    ExprPtr operator()(const EQuote&) const { return src; }
    ExprPtr src;
  };
  return std::visit(V{e}, e->node);
}

}  // namespace bx
