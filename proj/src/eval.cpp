#include "bx/eval.hpp"

#include <utility>

namespace bx {

namespace {

// First-order pattern match, filling `out` with the bindings.
bool matchPat(const PatPtr& p, const FOPtr& u, ValueEnv& out) {
  if (const auto* v = std::get_if<PVar>(&p->node)) {
    out[v->name] = u;
    return true;
  }
  const auto& c = std::get<PCon>(p->node);
  if (c.con != u->con || c.args.size() != u->args.size()) return false;
  for (size_t i = 0; i < c.args.size(); ++i) {
    if (!matchPat(c.args[i], u->args[i], out)) return false;
  }
  return true;
}

PatPtr renamePat(const PatPtr& p, const std::map<std::string, std::string>& ren) {
  if (const auto* v = std::get_if<PVar>(&p->node)) {
    auto it = ren.find(v->name);
    return pvar(it == ren.end() ? v->name : it->second);
  }
  const auto& c = std::get<PCon>(p->node);
  std::vector<PatPtr> args;
  args.reserve(c.args.size());
  for (const auto& a : c.args) args.push_back(renamePat(a, ren));
  return pcon(c.con, std::move(args));
}

bool patBinds(const PatPtr& p, const std::string& name) {
  if (const auto* v = std::get_if<PVar>(&p->node)) return v->name == name;
  for (const auto& a : std::get<PCon>(p->node).args) {
    if (patBinds(a, name)) return true;
  }
  return false;
}

constexpr const char* kHoleSentinelCon = "#hole";

struct DepthGuard {
  int& depth;
  explicit DepthGuard(int& d) : depth(d) {
    if (++depth > 8000) throw FuelExhausted("evaluation recursion too deep");
  }
  ~DepthGuard() { --depth; }
};

int evalDepth = 0;

}  // namespace

namespace {

// Shared engine for substitution and renaming: replaces free occurrences of
// `name` with `replacement`; `holeRecord` (when set) is additionally written
// into the pending bindings of any hole in scope of the substitution.
struct SubstV {
  const std::string& name;
  const ExprPtr& replacement;
  const FOPtr* holeRecord;

  ExprPtr go(const ExprPtr& e) {
    auto out = std::visit(*this, e->node);
    return out ? out : e;
  }

  // Each case returns nullptr when the subtree is unchanged.
  ExprPtr operator()(const EVar& n) { return n.name == name ? replacement : nullptr; }
    ExprPtr operator()(const ELam& n) {
      if (n.binder == name) return nullptr;
      auto b = go(n.body);
      return b == n.body ? nullptr : elam(n.binder, b);
    }
    ExprPtr operator()(const EApp& n) {
      auto f = go(n.fn);
      auto a = go(n.arg);
      return (f == n.fn && a == n.arg) ? nullptr : eapp(f, a);
    }
    ExprPtr operator()(const ECon& n) {
      auto [args, changed] = goAll(n.args);
      return changed ? econ(n.con, std::move(args)) : nullptr;
    }
    ExprPtr operator()(const EBCon& n) {
      auto [args, changed] = goAll(n.args);
      return changed ? ebcon(n.con, std::move(args)) : nullptr;
    }
    ExprPtr operator()(const ECase& n) {
      auto s = go(n.scrut);
      bool changed = s != n.scrut;
      std::vector<CaseBranch> brs;
      brs.reserve(n.branches.size());
      for (const auto& br : n.branches) {
        auto b = patBinds(br.pat, name) ? br.body : go(br.body);
        changed = changed || b != br.body;
        brs.push_back({br.pat, b});
      }
      return changed ? ecase(s, std::move(brs)) : nullptr;
    }
    ExprPtr operator()(const EBCase& n) {
      auto s = go(n.scrut);
      bool changed = s != n.scrut;
      std::vector<BCaseBranch> brs;
      brs.reserve(n.branches.size());
      for (const auto& br : n.branches) {
        auto b = patBinds(br.pat, name) ? br.body : go(br.body);
        auto ex = go(br.exitCond);  // with/by slots never see pattern vars
        auto rc = go(br.recon);
        changed = changed || b != br.body || ex != br.exitCond || rc != br.recon;
        brs.push_back({br.pat, b, ex, rc});
      }
      return changed ? ebcase(s, std::move(brs)) : nullptr;
    }
    ExprPtr operator()(const ELift& n) {
      auto b = go(n.body);
      return b == n.body ? nullptr : elift(b);
    }
    ExprPtr operator()(const EHole& n) {
      if (holeRecord) {
        auto pending = n.pending;
        pending[name] = *holeRecord;
        return ehole(n.info, std::move(pending));
      }
      return nullptr;  // higher-order or renaming: holes may not reference it
    }
    ExprPtr operator()(const EQuote&) { return nullptr; }

    std::pair<std::vector<ExprPtr>, bool> goAll(const std::vector<ExprPtr>& xs) {
      std::vector<ExprPtr> out;
      out.reserve(xs.size());
      bool changed = false;
      for (const auto& x : xs) {
        auto y = go(x);
        changed = changed || y != x;
        out.push_back(y);
      }
      return {std::move(out), changed};
    }
};

}  // namespace

ExprPtr substValue(const ExprPtr& e, const std::string& name, const ValPtr& v) {
  const auto* f = std::get_if<VFO>(&v->node);
  ExprPtr replacement = equote(v);
  SubstV vis{name, replacement, f ? &f->u : nullptr};
  return vis.go(e);
}

ExprPtr substRename(const ExprPtr& e, const std::string& name, const std::string& newName) {
  ExprPtr replacement = evar(newName);
  SubstV vis{name, replacement, nullptr};
  return vis.go(e);
}

Evaluator::Evaluator(const std::vector<Definition>& program, long fuel) : fuel_(fuel) {
  for (const auto& d : program) defs_[d.name] = d.body;
}

void Evaluator::spend() {
  if (fuel_-- <= 0) throw FuelExhausted("evaluation fuel exhausted");
}

ValPtr Evaluator::eval(const ExprPtr& e0) {
  DepthGuard guard(evalDepth);
  // Unfold chains of definition references iteratively so that a
  // self-referential definition burns fuel in constant stack space.
  ExprPtr e = e0;
  while (const auto* var = std::get_if<EVar>(&e->node)) {
    auto it = defs_.find(var->name);
    if (it == defs_.end()) return vres(rvar(var->name));
    spend();
    e = it->second;
  }

  struct V {
    Evaluator& ev;

    ValPtr operator()(const EVar&) { return nullptr; }  // handled above
    ValPtr operator()(const ELam& n) { return vclo(n.binder, n.body); }
    ValPtr operator()(const EApp& n) {
      auto f = ev.eval(n.fn);
      auto a = ev.eval(n.arg);
      return ev.apply(f, a);
    }
    ValPtr operator()(const ECon& n) {
      std::vector<FOPtr> us;
      us.reserve(n.args.size());
      for (const auto& a : n.args) us.push_back(valueToFO(ev.eval(a)));
      return vfo(fo(n.con, std::move(us)));
    }
    ValPtr operator()(const ECase& n) {
      auto sv = ev.eval(n.scrut);
      const auto* f = std::get_if<VFO>(&sv->node);
      if (!f) throw StuckTerm("case scrutinee is not a first-order value");
      for (const auto& br : n.branches) {
        ValueEnv binds;
        if (!matchPat(br.pat, f->u, binds)) continue;
        ev.spend();
        ExprPtr body = br.body;
        for (const auto& [x, u] : binds) body = substValue(body, x, vfo(u));
        return ev.eval(body);
      }
      throw PatternMatchFailure("no case branch matches " + showFO(f->u));
    }
    ValPtr operator()(const EBCon& n) {
      std::vector<ResPtr> args;
      args.reserve(n.args.size());
      for (const auto& a : n.args) {
        auto av = ev.eval(a);
        const auto* r = std::get_if<VRes>(&av->node);
        if (!r) throw StuckTerm("bidirectional constructor argument did not residualize");
        args.push_back(r->r);
      }
      return vres(rbcon(n.con, std::move(args)));
    }
    ValPtr operator()(const EBCase& n) {
      auto sv = ev.eval(n.scrut);
      const auto* r = std::get_if<VRes>(&sv->node);
      if (!r) throw StuckTerm("bidirectional case scrutinee did not residualize");
      std::vector<RBranch> brs;
      brs.reserve(n.branches.size());
      for (const auto& br : n.branches) {
        // Freshen pattern variables once, here; get and put later agree on
        // the names because both read them off this residual node.
        std::map<std::string, std::string> ren;
        for (const auto& x : patVars(br.pat)) ren[x] = ev.supply_.fresh(x);
        PatPtr pat = renamePat(br.pat, ren);
        ExprPtr body = br.body;
        for (const auto& [oldName, newName] : ren) {
          body = substRename(body, oldName, newName);
        }
        auto exitV = ev.eval(br.exitCond);
        auto reconV = ev.eval(br.recon);
        brs.push_back({pat, body, exitV, reconV});
      }
      return vres(rbcase(r->r, std::move(brs), ev.freshSiteId()));
    }
    ValPtr operator()(const ELift& n) {
      auto bv = ev.eval(n.body);
      const auto* f = std::get_if<VFO>(&bv->node);
      if (!f) throw StuckTerm("lifted expression is not a first-order value");
      return vres(rlift(f->u));
    }
    ValPtr operator()(const EHole& n) {
      if (!ev.sentinels_) throw UnfilledHoleEval(n.info->id);
      ev.event_ = HoleEvent{n.info->id, n.pending};
      return vfo(fo(kHoleSentinelCon));
    }
    ValPtr operator()(const EQuote& n) { return n.v; }
  };
  V vis{*this};
  return std::visit(vis, e->node);
}

ValPtr Evaluator::apply(const ValPtr& fn, const ValPtr& arg) {
  const auto* clo = std::get_if<VClo>(&fn->node);
  if (!clo) throw StuckTerm("applied a non-function value");
  spend();
  return eval(substValue(clo->body, clo->binder, arg));
}

ValPtr Evaluator::applyAll(const ValPtr& fn, const std::vector<FOPtr>& args) {
  ValPtr v = fn;
  for (const auto& u : args) v = apply(v, vfo(u));
  return v;
}

std::optional<bool> Evaluator::evalBool(const ValPtr& fn, const std::vector<FOPtr>& args) {
  event_.reset();
  auto v = applyAll(fn, args);
  if (isHoleSentinel(v)) return std::nullopt;
  auto u = valueToFO(v);
  if (u->con == "True" && u->args.empty()) return true;
  if (u->con == "False" && u->args.empty()) return false;
  throw StuckTerm("condition did not evaluate to a boolean, got " + showFO(u));
}

std::optional<HoleEvent> Evaluator::takeHoleEvent() {
  auto out = std::move(event_);
  event_.reset();
  return out;
}

bool Evaluator::isHoleSentinel(const ValPtr& v) {
  const auto* f = std::get_if<VFO>(&v->node);
  return f && isHoleSentinelFO(f->u);
}

bool Evaluator::isHoleSentinelFO(const FOPtr& u) {
  return u->con == kHoleSentinelCon;
}

ValPtr evalU(const std::vector<Definition>& program, const ExprPtr& e) {
  Evaluator ev(program);
  return ev.eval(e);
}

bool evalUBool(const std::vector<Definition>& program, const ValPtr& fn,
               const std::vector<FOPtr>& args) {
  Evaluator ev(program);
  auto b = ev.evalBool(fn, args);
  if (!b) throw StuckTerm("condition evaluation reached an unfilled hole");
  return *b;
}

FOPtr valueToFO(const ValPtr& v) {
  const auto* f = std::get_if<VFO>(&v->node);
  if (!f) throw StuckTerm("expected a first-order value");
  return f->u;
}

}  // namespace bx
