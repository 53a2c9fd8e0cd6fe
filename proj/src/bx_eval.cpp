#include "bx/bx_eval.hpp"

#include "bx/typecheck.hpp"

namespace bx {

namespace {

void matchInto(const PatPtr& p, const FOPtr& u, ValueEnv& out, bool& ok) {
  if (!ok) return;
  if (const auto* v = std::get_if<PVar>(&p->node)) {
    out[v->name] = u;
    return;
  }
  const auto& c = std::get<PCon>(p->node);
  if (c.con != u->con || c.args.size() != u->args.size()) {
    ok = false;
    return;
  }
  for (size_t i = 0; i < c.args.size(); ++i) matchInto(c.args[i], u->args[i], out, ok);
}

std::set<std::string> keysOf(const ValueEnv& mu) {
  std::set<std::string> out;
  for (const auto& [k, v] : mu) out.insert(k);
  return out;
}

}  // namespace

std::optional<ValueEnv> patMatch(const PatPtr& p, const FOPtr& u) {
  ValueEnv out;
  bool ok = true;
  matchInto(p, u, out, ok);
  if (!ok) return std::nullopt;
  return out;
}

FOPtr patBuild(const PatPtr& p, const ValueEnv& mu) {
  if (const auto* v = std::get_if<PVar>(&p->node)) {
    auto it = mu.find(v->name);
    if (it == mu.end()) throw MissingBinding(v->name);
    return it->second;
  }
  const auto& c = std::get<PCon>(p->node);
  std::vector<FOPtr> args;
  args.reserve(c.args.size());
  for (const auto& a : c.args) args.push_back(patBuild(a, mu));
  return fo(c.con, std::move(args));
}

ValueEnv envMerge(const ValueEnv& a, const ValueEnv& b) {
  ValueEnv out = a;
  for (const auto& [k, v] : b) {
    auto it = out.find(k);
    if (it != out.end()) {
      if (!foEq(it->second, v)) throw MergeConflict(k, it->second, v);
    } else {
      out.emplace(k, v);
    }
  }
  return out;
}

std::pair<ValueEnv, ValueEnv> envSplit(const ValueEnv& mu, const std::set<std::string>& X,
                                       const std::set<std::string>& Y) {
  for (const auto& x : X) {
    if (Y.count(x)) throw DomainViolation("split domains overlap at " + x);
  }
  ValueEnv left, right;
  for (const auto& [k, v] : mu) {
    if (X.count(k)) {
      left.emplace(k, v);
    } else if (Y.count(k)) {
      right.emplace(k, v);
    } else {
      throw DomainViolation("binding " + k + " belongs to neither side of the split");
    }
  }
  return {std::move(left), std::move(right)};
}

ValueEnv envDefault(const ValueEnv& upd, const ValueEnv& base) {
  ValueEnv out = upd;
  for (const auto& [k, v] : base) out.emplace(k, v);  // no overwrite
  return out;
}

ValueEnv envDisjointUnion(const ValueEnv& a, const ValueEnv& b) {
  ValueEnv out = a;
  for (const auto& [k, v] : b) {
    if (!out.emplace(k, v).second) {
      throw DomainViolation("environments are not disjoint at " + k);
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// BxEval
// --------------------------------------------------------------------------

std::optional<bool> BxEval::checkExit(const ValPtr& cond, const FOPtr& u, int siteId, int branch,
                                      bool expected) {
  auto b = ev_.evalBool(cond, {u});
  if (!b) {
    auto event = ev_.takeHoleEvent();
    if (event && sink_) sink_({event->holeId, event->pending, expected, siteId, branch});
    return std::nullopt;  // deferred: treated as satisfied for now
  }
  return b;
}

ResPtr BxEval::forceBody(const ExprPtr& body) {
  auto v = ev_.eval(body);
  const auto* r = std::get_if<VRes>(&v->node);
  if (!r) throw StuckTerm("branch body did not residualize");
  return r->r;
}

GetResult BxEval::get(const ValueEnv& mu, const ResPtr& E) {
  if (const auto* var = std::get_if<RVar>(&E->node)) {
    auto it = mu.find(var->name);
    if (it == mu.end()) throw MissingBinding(var->name);
    return {it->second, tEps()};
  }
  if (const auto* con = std::get_if<RBCon>(&E->node)) {
    std::vector<FOPtr> us;
    std::vector<TracePtr> trs;
    us.reserve(con->args.size());
    trs.reserve(con->args.size());
    for (const auto& a : con->args) {
      auto r = get(mu, a);
      us.push_back(r.value);
      trs.push_back(r.trace);
    }
    return {fo(con->con, std::move(us)), tTup(std::move(trs))};
  }
  if (const auto* lift = std::get_if<RLift>(&E->node)) {
    return {lift->u, tEps()};
  }
  const auto& bc = std::get<RBCase>(E->node);
  auto scrut = get(mu, bc.scrut);
  for (size_t i = 0; i < bc.branches.size(); ++i) {
    const auto& br = bc.branches[i];
    auto bound = patMatch(br.pat, scrut.value);
    if (!bound) continue;
    auto body = get(envDisjointUnion(mu, *bound), forceBody(br.body));
    auto ok = checkExit(br.exitCond, body.value, bc.siteId, static_cast<int>(i), true);
    if (ok && !*ok) throw ExitAssertionFailed(static_cast<int>(i), body.value);
    return {body.value, tBr(scrut.trace, static_cast<int>(i), body.trace)};
  }
  throw NoBranchMatches("scrutinee " + showFO(scrut.value) + " matches no branch pattern");
}

PutResult BxEval::put(const ValueEnv& mu, const ResPtr& E, const FOPtr& u,
                      const TracePtr& guide) {
  if (const auto* var = std::get_if<RVar>(&E->node)) {
    if (guide && !std::holds_alternative<TEps>(guide->node)) {
      throw TraceMismatch("expected an empty trace at a variable");
    }
    return {{{var->name, u}}, tEps()};
  }
  if (const auto* lift = std::get_if<RLift>(&E->node)) {
    if (guide && !std::holds_alternative<TEps>(guide->node)) {
      throw TraceMismatch("expected an empty trace at a lifted constant");
    }
    if (!foEq(lift->u, u)) throw LiftMismatch(lift->u, u);
    return {{}, tEps()};
  }
  if (const auto* con = std::get_if<RBCon>(&E->node)) {
    if (u->con != con->con || u->args.size() != con->args.size()) {
      throw PutConMismatch("updated view " + showFO(u) + " does not start with constructor " +
                           con->con + "/" + std::to_string(con->args.size()));
    }
    const TTup* parts = nullptr;
    if (guide) {
      parts = std::get_if<TTup>(&guide->node);
      if (!parts || parts->parts.size() != con->args.size()) {
        throw TraceMismatch("expected a tuple trace at a bidirectional constructor");
      }
    }
    ValueEnv env;
    std::vector<TracePtr> trs;
    trs.reserve(con->args.size());
    for (size_t i = 0; i < con->args.size(); ++i) {
      auto r = put(mu, con->args[i], u->args[i], parts ? parts->parts[i] : nullptr);
      env = envMerge(env, r.env);
      trs.push_back(r.trace);
    }
    return {std::move(env), tTup(std::move(trs))};
  }

  const auto& bc = std::get<RBCase>(E->node);
  const int n = static_cast<int>(bc.branches.size());

  // Premise shared by both rules: the original value of the scrutinee and
  // the branch the forward execution took on it.
  FOPtr u0 = get(mu, bc.scrut).value;
  std::optional<int> orig;
  ValueEnv muOrig;
  for (int i = 0; i < n; ++i) {
    if (auto bound = patMatch(bc.branches[i].pat, u0)) {
      orig = i;
      muOrig = std::move(*bound);
      break;
    }
  }

  int b = -1;
  bool switching = false;
  const TBr* tbr = nullptr;
  if (guide) {
    tbr = std::get_if<TBr>(&guide->node);
    if (!tbr || tbr->branch < 0 || tbr->branch >= n) {
      throw TraceMismatch("expected a branch trace with a valid index at a bidirectional case");
    }
    b = tbr->branch;
    switching = !orig || b != *orig;
    // The taken branch's exit condition must accept the updated view.
    auto cb = checkExit(bc.branches[b].exitCond, u, bc.siteId, b, true);
    if (cb && !*cb) throw ExitConditionRejects(b, "exit condition rejects the updated view");
    // On a switch, the original branch's exit condition must now reject it
    // (otherwise the backward execution would have stayed).
    if (switching && orig) {
      auto co = checkExit(bc.branches[*orig].exitCond, u, bc.siteId, *orig, false);
      if (co && *co) {
        throw ExitConditionRejects(*orig, "original branch still accepts the updated view");
      }
    }
  } else {
    if (!orig) {
      throw NoBranchMatches("original scrutinee " + showFO(u0) + " matches no branch pattern");
    }
    // Original branch preferred; otherwise the topmost branch whose exit
    // condition accepts the view, all earlier ones rejecting it.
    auto co = checkExit(bc.branches[*orig].exitCond, u, bc.siteId, *orig, true);
    if (co && *co) {
      b = *orig;
    } else {
      for (int j = 0; j < n && b < 0; ++j) {
        if (j == *orig) continue;  // known to reject
        auto cj = checkExit(bc.branches[j].exitCond, u, bc.siteId, j, true);
        if (cj && *cj) b = j;
      }
      if (b < 0) {
        throw NoBranchMatches("no exit condition accepts the updated view " + showFO(u));
      }
      switching = true;
    }
  }

  if (branchSink_) branchSink_({bc.siteId, orig, b, u0, u});

  ValueEnv muB;
  if (!switching) {
    muB = muOrig;
  } else {
    // Reconciliation: rewrite the original scrutinee so the target branch's
    // pattern matches it.
    auto rec = valueToFO(ev_.applyAll(bc.branches[b].recon, {u0, u}));
    auto bound = patMatch(bc.branches[b].pat, rec);
    if (!bound) {
      throw ReconPatternMismatch("reconciled scrutinee " + showFO(rec) +
                                 " does not match pattern " + showPattern(bc.branches[b].pat));
    }
    muB = std::move(*bound);
  }

  auto body = put(envDisjointUnion(mu, muB), forceBody(bc.branches[b].body), u,
                  tbr ? tbr->body : nullptr);
  auto [muOuter, muInner] = envSplit(body.env, keysOf(mu), keysOf(muB));
  FOPtr u0p = patBuild(bc.branches[b].pat, envDefault(muInner, muB));
  auto scrut = put(mu, bc.scrut, u0p, tbr ? tbr->scrut : nullptr);
  return {envMerge(scrut.env, muOuter), tBr(scrut.trace, b, body.trace)};
}

GetResult getT(Evaluator& ev, const ValueEnv& mu, const ResPtr& E) {
  return BxEval(ev).get(mu, E);
}

PutResult putT(Evaluator& ev, const ValueEnv& mu, const ResPtr& E, const FOPtr& u,
               const TracePtr& guide) {
  return BxEval(ev).put(mu, E, u, guide);
}

// --------------------------------------------------------------------------
// Whole-program wrappers
// --------------------------------------------------------------------------

std::pair<ResPtr, std::string> residualizeEntry(Evaluator& ev, const ExprPtr& entry) {
  std::string x = ev.names().fresh("s");
  auto v = ev.eval(eapp(entry, evar(x)));
  const auto* r = std::get_if<VRes>(&v->node);
  if (!r) {
    throw EntryTypeError("entry point did not evaluate to a bidirectional value");
  }
  return {r->r, x};
}

namespace {

void checkEntryType(const SynthesisInput& in, const ExprPtr& entry) {
  TypePtr t;
  try {
    t = inferExpr(in.datatypes, TypeEnvs{in.typingEnv, {}}, entry);
  } catch (const BxError& e) {
    throw EntryTypeError(std::string("entry point is not typeable: ") + e.what());
  }
  const auto* f = std::get_if<TFun>(&t->node);
  if (!f || !isBX(f->arg) || !isBX(f->result)) {
    throw EntryTypeError("entry point must map a bidirectional source to a bidirectional view, "
                         "got " +
                         showType(t));
  }
}

}  // namespace

FOPtr runGet(const SynthesisInput& in, const ExprPtr& entry, const FOPtr& s) {
  checkEntryType(in, entry);
  Evaluator ev(in.program);
  auto [E, x] = residualizeEntry(ev, entry);
  return BxEval(ev).get({{x, s}}, E).value;
}

FOPtr runPut(const SynthesisInput& in, const ExprPtr& entry, const FOPtr& s, const FOPtr& v) {
  checkEntryType(in, entry);
  Evaluator ev(in.program);
  auto [E, x] = residualizeEntry(ev, entry);
  auto r = BxEval(ev).put({{x, s}}, E, v);
  auto it = r.env.find(x);
  return it != r.env.end() ? it->second : s;  // default unused source
}

}  // namespace bx
