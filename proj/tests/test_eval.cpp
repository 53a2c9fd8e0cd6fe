#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bx/eval.hpp"
#include "bx/surface.hpp"

using namespace bx;

namespace {

const char* kAppendB = R"(
appendB : BX [Int] -> BX [Int] -> BX [Int]
appendB xs ys = case* xs of
  { [] -> ys
      with (\s -> case s of { [] -> True ; w : ws -> False })
      by (\s v -> s)
  ; a : x -> a :* appendB x ys
      with (\s -> case s of { [] -> False ; w : ws -> True })
      by (\s v -> s)
  }

#entry appendB
)";

const char* kAppendU = R"(
append : [Int] -> [Int] -> [Int]
append xs ys = case xs of { [] -> ys ; a : x -> a : append x ys }

null : [Int] -> Bool
null s = case s of { [] -> True ; w : ws -> False }

notNull : [Int] -> Bool
notNull s = not (null s)

#entry append
)";

SynthesisInput load(const char* text) { return toSynthesisInput(parseSpec(text)); }

ExprPtr app2(const std::string& f, ExprPtr a, ExprPtr b) {
  return eapp(eapp(evar(f), std::move(a)), std::move(b));
}

}  // namespace

TEST_CASE("evalU: lambdas evaluate to closures, constants to themselves") {
  std::vector<Definition> none;
  auto idv = evalU(none, elam("x", evar("x")));
  CHECK(std::holds_alternative<VClo>(idv->node));

  auto three = evalU(none, efo(foNat(3)));
  CHECK(foEq(valueToFO(three), foNat(3)));

  // A free variable is a residual variable.
  auto xv = evalU(none, evar("x"));
  REQUIRE(std::holds_alternative<VRes>(xv->node));
  CHECK(std::holds_alternative<RVar>(std::get<VRes>(xv->node).r->node));
}

TEST_CASE("evalU: unidirectional append against a native oracle") {
  auto in = load(kAppendU);
  std::vector<FOPtr> xs = {foNat(1), foNat(2)};
  std::vector<FOPtr> ys = {foNat(3)};
  auto result = evalU(in.program, app2("append", efo(foList(xs)), efo(foList(ys))));

  std::vector<FOPtr> native = xs;
  native.insert(native.end(), ys.begin(), ys.end());
  CHECK(foEq(valueToFO(result), foList(native)));
}

TEST_CASE("evalU: composed boolean components") {
  auto in = load(kAppendU);
  auto r = evalU(in.program, eapp(evar("notNull"), efo(foList({foNat(6), foNat(2)}))));
  CHECK(foEq(valueToFO(r), foBool(true)));
  auto r2 = evalU(in.program, eapp(evar("notNull"), efo(foList({}))));
  CHECK(foEq(valueToFO(r2), foBool(false)));

  // evalUBool drives an applied closure to a boolean.
  auto notNull = evalU(in.program, evar("notNull"));
  CHECK(evalUBool(in.program, notNull, {foList({foNat(6)})}));
  CHECK_FALSE(evalUBool(in.program, notNull, {foList({})}));
}

TEST_CASE("evalU: bidirectional case freezes with delayed branch bodies") {
  auto in = load(kAppendB);
  auto v = evalU(in.program, app2("appendB", evar("xs"), evar("ys")));

  REQUIRE(std::holds_alternative<VRes>(v->node));
  const auto& res = std::get<VRes>(v->node).r;
  REQUIRE(std::holds_alternative<RBCase>(res->node));
  const auto& rc = std::get<RBCase>(res->node);

  // Scrutinee already evaluated to the residual variable xs.
  REQUIRE(std::holds_alternative<RVar>(rc.scrut->node));
  CHECK(std::get<RVar>(rc.scrut->node).name == "xs");

  REQUIRE(rc.branches.size() == 2);
  // with/by slots are evaluated closures.
  for (const auto& br : rc.branches) {
    CHECK(std::holds_alternative<VClo>(br.exitCond->node));
    CHECK(std::holds_alternative<VClo>(br.recon->node));
  }
  // The cons branch body stays an unevaluated expression mentioning the
  // recursive call; its pattern variables were freshened.
  const auto& cons = rc.branches[1];
  auto vars = patVars(cons.pat);
  REQUIRE(vars.size() == 2);
  CHECK(vars[0] != "a");  // freshened
  CHECK(vars[0].find('#') != std::string::npos);
  auto fv = freeVars(cons.body);
  CHECK(fv.count("appendB") == 1);
  CHECK(fv.count(vars[0]) == 1);
  CHECK(fv.count(vars[1]) == 1);

  // Nil branch body is the delayed expression for ys (a substituted value).
  auto nilBody = evalU(in.program, rc.branches[0].body);
  REQUIRE(std::holds_alternative<VRes>(nilBody->node));
  CHECK(std::get<RVar>(std::get<VRes>(nilBody->node).r->node).name == "ys");
}

TEST_CASE("evalU: residualization is deterministic") {
  auto in = load(kAppendB);
  auto mk = [&] { return evalU(in.program, app2("appendB", evar("xs"), evar("ys"))); };
  auto a = mk();
  auto b = mk();
  const auto& ba = std::get<RBCase>(std::get<VRes>(a->node).r->node).branches;
  const auto& bb = std::get<RBCase>(std::get<VRes>(b->node).r->node).branches;
  REQUIRE(ba.size() == bb.size());
  for (size_t i = 0; i < ba.size(); ++i) {
    CHECK(patEq(ba[i].pat, bb[i].pat));  // identical fresh names
  }
}

TEST_CASE("evalU: pattern match failure and stuck terms") {
  auto in = load(kAppendU);
  // null (S Z) : no branch of a list case matches a successor value.
  CHECK_THROWS_AS(evalU(in.program, eapp(evar("null"), efo(foNat(1)))), PatternMatchFailure);
  // Applying a first-order value.
  std::vector<Definition> none;
  CHECK_THROWS_AS(evalU(none, eapp(efo(foNat(1)), efo(foNat(2)))), StuckTerm);
  // Case on a closure.
  CHECK_THROWS_AS(
      evalU(none, ecase(elam("x", evar("x")), {{pcon("True", {}), efo(foNat(1))}})),
      StuckTerm);
}

TEST_CASE("evalU: self-referential definition exhausts fuel") {
  std::vector<Definition> prog = {{"f", evar("f")}};
  CHECK_THROWS_AS(evalU(prog, evar("f")), FuelExhausted);

  // A self-application loop is cut off too.
  std::vector<Definition> loop = {{"g", elam("x", eapp(evar("g"), evar("x")))}};
  CHECK_THROWS_AS(evalU(loop, eapp(evar("g"), efo(foNat(0)))), FuelExhausted);
}

TEST_CASE("evalU: hole sentinels record first-order bindings") {
  auto info = std::make_shared<HoleInfo>();
  auto mut = std::const_pointer_cast<HoleInfo>(info);
  mut->id = 7;
  mut->kind = HoleKind::Exit;

  // \s -> case s of { w : ws -> HOLE ; [] -> False }
  auto body = ecase(evar("s"), {{pcon(":", {pvar("w"), pvar("ws")}), ehole(info)},
                                {pcon("[]", {}), econ("False")}});
  auto exitFn = elam("s", body);

  std::vector<Definition> none;
  Evaluator ev(none);
  ev.enableHoleSentinels(true);
  auto clo = ev.eval(exitFn);

  auto got = ev.evalBool(clo, {foList({foNat(6), foNat(2)})});
  CHECK_FALSE(got.has_value());  // sentinel: constraint deferred
  auto event = ev.takeHoleEvent();
  REQUIRE(event.has_value());
  CHECK(event->holeId == 7);
  REQUIRE(event->pending.count("w") == 1);
  REQUIRE(event->pending.count("ws") == 1);
  REQUIRE(event->pending.count("s") == 1);
  CHECK(foEq(event->pending.at("w"), foNat(6)));
  CHECK(foEq(event->pending.at("ws"), foList({foNat(2)})));
  CHECK(!ev.takeHoleEvent().has_value());  // consumed

  // The empty list takes the concrete branch: a real answer, no event.
  auto concrete = ev.evalBool(clo, {foList({})});
  REQUIRE(concrete.has_value());
  CHECK_FALSE(*concrete);
  CHECK(!ev.takeHoleEvent().has_value());

  // With sentinels off the same evaluation fails loudly.
  Evaluator strict(none);
  auto clo2 = strict.eval(exitFn);
  CHECK_THROWS_AS(strict.evalBool(clo2, {foList({foNat(6)})}), UnfilledHoleEval);
}

TEST_CASE("substValue: shadowing is respected") {
  std::vector<Definition> none;
  // (\x -> \x -> x) 1 2  ==>  2
  auto e = eapp(eapp(elam("x", elam("x", evar("x"))), efo(foNat(1))), efo(foNat(2)));
  CHECK(foEq(valueToFO(evalU(none, e)), foNat(2)));

  // case binding shadows an outer lambda: (\a -> case [9] of { a : x -> a }) 5
  auto c = ecase(efo(foList({foNat(9)})), {{pcon(":", {pvar("a"), pvar("x")}), evar("a")}});
  auto e2 = eapp(elam("a", c), efo(foNat(5)));
  CHECK(foEq(valueToFO(evalU(none, e2)), foNat(9)));
}
