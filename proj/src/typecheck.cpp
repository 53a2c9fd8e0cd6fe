#include "bx/typecheck.hpp"

namespace bx {

namespace {

struct Checker {
  const DataDeclTable& table;

  [[noreturn]] void mismatch(Pos pos, const std::string& found, const TypePtr& expected) {
    throw TypeError(pos, found, showType(expected));
  }
  [[noreturn]] void mismatch(Pos pos, const TypePtr& found, const TypePtr& expected) {
    throw TypeError(pos, showType(found), showType(expected));
  }

  static void bindUni(TypeEnvs& envs, const std::string& name, const TypePtr& t) {
    envs.uni[name] = t;
    envs.bx.erase(name);
  }
  static void bindBx(TypeEnvs& envs, const std::string& name, const TypePtr& t) {
    envs.bx[name] = t;
    envs.uni.erase(name);
  }

  std::map<std::string, TypePtr> pattern(const PatPtr& p, const TypePtr& t) {
    std::map<std::string, TypePtr> out;
    patternGo(p, t, out);
    return out;
  }

  void patternGo(const PatPtr& p, const TypePtr& t, std::map<std::string, TypePtr>& out) {
    if (auto* v = std::get_if<PVar>(&p->node)) {
      if (!out.emplace(v->name, t).second)
        throw NonLinearPattern("pattern variable " + v->name + " bound twice");
      return;
    }
    const auto& c = std::get<PCon>(p->node);
    auto ci = table.findCon(c.con);
    if (!ci) throw TypeError(Pos{}, "unknown constructor " + c.con, showType(t));
    if (static_cast<size_t>(table.conArity(c.con)) != c.args.size())
      throw ConstructorArity("constructor " + c.con + " expects " +
                             std::to_string(table.conArity(c.con)) + " arguments, pattern has " +
                             std::to_string(c.args.size()));
    auto argTypes = table.conArgTypes(c.con, t);
    if (!argTypes) mismatch(Pos{}, dataType(ci->decl->name), t);
    for (size_t k = 0; k < c.args.size(); ++k) patternGo(c.args[k], (*argTypes)[k], out);
  }

  TypePtr infer(const TypeEnvs& envs, const ExprPtr& e) {
    struct V {
      Checker& self;
      const TypeEnvs& envs;
      const ExprPtr& e;

      TypePtr operator()(const EVar& n) {
        auto it = envs.uni.find(n.name);
        if (it != envs.uni.end()) return it->second;
        auto ib = envs.bx.find(n.name);
        if (ib != envs.bx.end()) return bxType(ib->second);
        throw UnboundVariable(e->pos, n.name);
      }
      TypePtr operator()(const ELam&) {
        throw TypeError(e->pos, "lambda", "a type determined by its context");
      }
      TypePtr operator()(const EApp& n) {
        TypePtr ft = self.infer(envs, n.fn);
        auto* f = std::get_if<TFun>(&ft->node);
        if (!f) self.mismatch(n.fn->pos, ft, funType(dataType("_"), dataType("_")));
        self.check(envs, n.arg, f->arg);
        return f->result;
      }
      TypePtr operator()(const ECon& n) { return self.inferCon(envs, e, n.con, n.args, false); }
      TypePtr operator()(const EBCon& n) { return self.inferCon(envs, e, n.con, n.args, true); }
      TypePtr operator()(const ECase& n) {
        TypePtr st = self.infer(envs, n.scrut);
        if (n.branches.empty()) throw TypeError(e->pos, "case with no branches", "branches");
        TypePtr result;
        for (const auto& br : n.branches) {
          TypeEnvs inner = envs;
          for (const auto& [name, ty] : self.pattern(br.pat, st)) bindUni(inner, name, ty);
          if (!result) result = self.infer(inner, br.body);
          else self.check(inner, br.body, result);
        }
        return result;
      }
      TypePtr operator()(const EBCase&) {
        throw TypeError(e->pos, "bidirectional case", "a type determined by its context");
      }
      TypePtr operator()(const ELift& n) {
        TypeEnvs uniOnly{envs.uni, {}};
        TypePtr t = self.infer(uniOnly, n.body);
        if (!isFirstOrder(t)) self.mismatch(n.body->pos, t, dataType("a first-order type"));
        return bxType(t);
      }
      TypePtr operator()(const EHole& n) {
        if (!n.info->targetType)
          throw TypeError(e->pos, "hole without a recorded type", "a typed hole");
        return n.info->targetType;
      }
      TypePtr operator()(const EQuote&) {
        throw TypeError(e->pos, "internal value node", "a source expression");
      }
    };
    return std::visit(V{*this, envs, e}, e->node);
  }

  // Constructors of parameter-free datatypes can be inferred directly.
  TypePtr inferCon(const TypeEnvs& envs, const ExprPtr& e, const std::string& con,
                   const std::vector<ExprPtr>& args, bool bidir) {
    auto ci = table.findCon(con);
    if (!ci) throw UnboundVariable(e->pos, con);
    if (!ci->decl->params.empty())
      throw TypeError(e->pos, "constructor " + con + " of parameterized datatype",
                      "a type determined by its context");
    TypePtr result = dataType(ci->decl->name);
    TypePtr whole = bidir ? bxType(result) : result;
    check(envs, e, whole);
    return whole;
  }

  void check(const TypeEnvs& envs, const ExprPtr& e, const TypePtr& expected) {
    struct V {
      Checker& self;
      const TypeEnvs& envs;
      const ExprPtr& e;
      const TypePtr& expected;

      void viaInfer() {
        TypePtr found = self.infer(envs, e);
        if (!typeEq(found, expected)) self.mismatch(e->pos, found, expected);
      }

      void operator()(const EVar&) { viaInfer(); }
      void operator()(const EApp&) { viaInfer(); }
      void operator()(const EQuote&) { viaInfer(); }

      void operator()(const ELam& n) {
        auto* f = std::get_if<TFun>(&expected->node);
        if (!f) self.mismatch(e->pos, "lambda", expected);
        TypeEnvs inner = envs;
        bindUni(inner, n.binder, f->arg);
        self.check(inner, n.body, f->result);
      }

      void operator()(const ECon& n) {
        auto argTypes = self.table.conArgTypes(n.con, expected);
        if (!argTypes) {
          auto ci = self.table.findCon(n.con);
          if (!ci) throw UnboundVariable(e->pos, n.con);
          self.mismatch(e->pos, "constructor " + n.con + " of " + ci->decl->name, expected);
        }
        if (argTypes->size() != n.args.size())
          throw ConstructorArity("constructor " + n.con + " expects " +
                                 std::to_string(argTypes->size()) + " arguments");
        for (size_t k = 0; k < n.args.size(); ++k) self.check(envs, n.args[k], (*argTypes)[k]);
      }

      void operator()(const EBCon& n) {
        auto* x = std::get_if<TBX>(&expected->node);
        if (!x) self.mismatch(e->pos, "bidirectional constructor " + n.con, expected);
        auto argTypes = self.table.conArgTypes(n.con, x->inner);
        if (!argTypes) {
          auto ci = self.table.findCon(n.con);
          if (!ci) throw UnboundVariable(e->pos, n.con);
          self.mismatch(e->pos, "constructor " + n.con + " of " + ci->decl->name, expected);
        }
        if (argTypes->size() != n.args.size())
          throw ConstructorArity("constructor " + n.con + " expects " +
                                 std::to_string(argTypes->size()) + " arguments");
        for (size_t k = 0; k < n.args.size(); ++k)
          self.check(envs, n.args[k], bxType((*argTypes)[k]));
      }

      void operator()(const ECase& n) {
        TypePtr st = self.infer(envs, n.scrut);
        if (!std::holds_alternative<TData>(st->node)) self.mismatch(n.scrut->pos, st, expected);
        for (const auto& br : n.branches) {
          TypeEnvs inner = envs;
          for (const auto& [name, ty] : self.pattern(br.pat, st)) bindUni(inner, name, ty);
          self.check(inner, br.body, expected);
        }
      }

      void operator()(const EBCase& n) {
        auto* x = std::get_if<TBX>(&expected->node);
        if (!x) self.mismatch(e->pos, "bidirectional case", expected);
        TypePtr st = self.infer(envs, n.scrut);
        auto* sx = std::get_if<TBX>(&st->node);
        if (!sx) self.mismatch(n.scrut->pos, st, bxType(dataType("Int")));
        TypePtr sigma0 = sx->inner;   // scrutinee view type
        TypePtr sigma = x->inner;     // result view type
        TypePtr exitType = funType(sigma, tBool());
        TypePtr reconType = funType(sigma0, funType(sigma, sigma0));
        for (const auto& br : n.branches) {
          TypeEnvs inner = envs;
          for (const auto& [name, ty] : self.pattern(br.pat, sigma0)) {
            if (!isFirstOrder(ty))
              throw TypeError(e->pos, showType(ty), "a first-order pattern binding");
            bindBx(inner, name, ty);
          }
          self.check(inner, br.body, expected);
          // exit conditions and reconciliations cannot see the branch's
          // pattern variables: check them in the outer environment
          if (!br.exitCond) throw TypeError(e->pos, "missing exit condition", showType(exitType));
          if (!br.recon) throw TypeError(e->pos, "missing reconciliation", showType(reconType));
          self.check(envs, br.exitCond, exitType);
          self.check(envs, br.recon, reconType);
        }
      }

      void operator()(const ELift& n) {
        auto* x = std::get_if<TBX>(&expected->node);
        if (!x) self.mismatch(e->pos, "lifted expression", expected);
        TypeEnvs uniOnly{envs.uni, {}};
        self.check(uniOnly, n.body, x->inner);
      }

      void operator()(const EHole& n) {
        if (!n.info->targetType)
          throw TypeError(e->pos, "hole without a recorded type", showType(expected));
        if (!typeEq(n.info->targetType, expected))
          self.mismatch(e->pos, n.info->targetType, expected);
      }
    };
    std::visit(V{*this, envs, e, expected}, e->node);
  }
};

}  // namespace

void checkExpr(const DataDeclTable& datatypes, const TypeEnvs& envs, const ExprPtr& e,
               const TypePtr& expected) {
  Checker c{datatypes};
  c.check(envs, e, expected);
}

TypePtr inferExpr(const DataDeclTable& datatypes, const TypeEnvs& envs, const ExprPtr& e) {
  Checker c{datatypes};
  return c.infer(envs, e);
}

std::map<std::string, TypePtr> checkPattern(const DataDeclTable& datatypes, const PatPtr& p,
                                            const TypePtr& scrutineeType) {
  Checker c{datatypes};
  return c.pattern(p, scrutineeType);
}

void checkProgram(const SynthesisInput& input) {
  Checker c{input.datatypes};
  TypeEnvs envs;
  for (const auto& d : input.program) {
    auto it = input.typingEnv.find(d.name);
    if (it == input.typingEnv.end())
      throw TypeError(Pos{}, "definition " + d.name + " without a signature", "a signature");
    envs.uni[d.name] = it->second;
  }
  for (const auto& d : input.program) c.check(envs, d.body, input.typingEnv.at(d.name));
}

}  // namespace bx
