#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bx/surface.hpp"
#include "bx/typecheck.hpp"

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

const char* kAppendSpec = R"(
append : [Int] -> [Int] -> [Int]
append xs ys = case xs of { [] -> ys ; a : x -> a : append x ys }
uncurryB : ([Int] -> [Int] -> [Int]) -> ([Int], [Int]) -> [Int]
uncurryB f s = case s of { (x, y) -> f x y }
#entry uncurryB append
#example put ([1,2,3],[4,5]) [6,2] = ([6,2],[])
)";

DataDeclTable prelude() { return DataDeclTable::prelude(); }

}  // namespace

TEST_CASE("checkExpr: variables in both contexts") {
  DataDeclTable t = prelude();
  TypeEnvs envs;
  envs.uni["x"] = tBool();
  checkExpr(t, envs, evar("x"), tBool());
  CHECK_THROWS_AS(checkExpr(t, envs, evar("x"), tInt()), TypeError);
  CHECK_THROWS_AS(checkExpr(t, envs, evar("y"), tBool()), UnboundVariable);

  // a bidirectional pattern variable of type sigma is used at BX sigma
  TypeEnvs dual;
  dual.bx["a"] = tInt();
  checkExpr(t, dual, evar("a"), bxType(tInt()));
  CHECK_THROWS_AS(checkExpr(t, dual, evar("a"), tInt()), TypeError);
}

TEST_CASE("checkPattern") {
  DataDeclTable t = prelude();
  auto env = checkPattern(t, pcon(":", {pvar("a"), pvar("x")}), tList(tInt()));
  REQUIRE(env.size() == 2);
  CHECK(typeEq(env.at("a"), tInt()));
  CHECK(typeEq(env.at("x"), tList(tInt())));

  auto env2 = checkPattern(t, pvar("y"), tPair(tChar(), tInt()));
  CHECK(typeEq(env2.at("y"), tPair(tChar(), tInt())));

  CHECK_THROWS_AS(checkPattern(t, pcon(":", {pvar("a")}), tList(tInt())), ConstructorArity);
  CHECK_THROWS_AS(checkPattern(t, pcon(":", {pvar("a"), pvar("a")}), tList(tInt())),
                  NonLinearPattern);
  CHECK_THROWS_AS(checkPattern(t, pcon("S", {pvar("n")}), tList(tInt())), TypeError);
}

TEST_CASE("checkProgram: bidirectional append accepts at its signature") {
  SynthesisInput in = toSynthesisInput(parseSpec(kAppendB));
  checkProgram(in);
}

TEST_CASE("checkProgram: unidirectional append spec accepts") {
  SynthesisInput in = toSynthesisInput(parseSpec(kAppendSpec));
  checkProgram(in);
}

TEST_CASE("checkProgram: ill-founded but well-typed recursion accepts") {
  SynthesisInput in = toSynthesisInput(parseSpec("f : Int -> Int\nf = f\n#entry f\n"));
  checkProgram(in);
}

TEST_CASE("bx-pattern variables are invisible in with/by clauses") {
  // exit condition referencing the pattern variable `a` must be rejected
  const char* bad = R"(
f : BX [Int] -> BX [Int]
f xs = case* xs of
  { [] -> xs with (\s -> True) by (\s v -> s)
  ; a : x -> a :* f x with (\s -> case a of { 0 -> True ; n -> False }) by (\s v -> s)
  }
#entry f
)";
  SynthesisInput in = toSynthesisInput(parseSpec(bad));
  CHECK_THROWS_AS(checkProgram(in), UnboundVariable);

  // same reference from the reconciliation function
  const char* bad2 = R"(
f : BX [Int] -> BX [Int]
f xs = case* xs of
  { [] -> xs with (\s -> True) by (\s v -> s)
  ; a : x -> a :* f x with (\s -> True) by (\s v -> a : s)
  }
#entry f
)";
  CHECK_THROWS_AS(checkProgram(toSynthesisInput(parseSpec(bad2))), UnboundVariable);

  // but the branch body does see them
  const char* good = R"(
f : BX [Int] -> BX [Int]
f xs = case* xs of
  { [] -> xs with (\s -> True) by (\s v -> s)
  ; a : x -> a :* f x with (\s -> True) by (\s v -> s)
  }
#entry f
)";
  checkProgram(toSynthesisInput(parseSpec(good)));
}

TEST_CASE("exit and reconciliation slot types") {
  // exit must be sigma -> Bool where the bx-case has type BX sigma;
  // reconciliation must be sigma0 -> sigma -> sigma0 for scrutinee BX sigma0
  const char* wrongExit = R"(
f : BX [Int] -> BX Int
f xs = case* xs of { w -> !0 with (\s -> s) by (\s v -> s) }
#entry f
)";
  CHECK_THROWS_AS(checkProgram(toSynthesisInput(parseSpec(wrongExit))), TypeError);

  const char* rightTypes = R"(
f : BX [Int] -> BX Int
f xs = case* xs of { w -> !0 with (\s -> case s of { 0 -> True ; n -> False }) by (\s v -> s) }
#entry f
)";
  checkProgram(toSynthesisInput(parseSpec(rightTypes)));

  const char* wrongRecon = R"(
f : BX [Int] -> BX Int
f xs = case* xs of { w -> !0 with (\s -> True) by (\s v -> v) }
#entry f
)";
  CHECK_THROWS_AS(checkProgram(toSynthesisInput(parseSpec(wrongRecon))), TypeError);
}

TEST_CASE("lift bodies are unidirectional") {
  DataDeclTable t = prelude();
  TypeEnvs envs;
  envs.uni["n"] = tInt();
  checkExpr(t, envs, elift(evar("n")), bxType(tInt()));
  CHECK_THROWS_AS(checkExpr(t, envs, elift(evar("n")), tInt()), TypeError);

  // bx variables are not visible inside a lift
  TypeEnvs dual;
  dual.bx["a"] = tInt();
  CHECK_THROWS_AS(checkExpr(t, dual, elift(evar("a")), bxType(tInt())), UnboundVariable);
}

TEST_CASE("bidirectional constructors take BX arguments") {
  DataDeclTable t = prelude();
  TypeEnvs envs;
  envs.uni["b"] = bxType(tInt());
  envs.uni["r"] = bxType(tList(tInt()));
  checkExpr(t, envs, ebcon(":", {evar("b"), evar("r")}), bxType(tList(tInt())));
  // unidirectional argument where BX is needed
  envs.uni["n"] = tInt();
  CHECK_THROWS_AS(checkExpr(t, envs, ebcon(":", {evar("n"), evar("r")}), bxType(tList(tInt()))),
                  TypeError);
  // bidirectional constructor at a non-BX type
  CHECK_THROWS_AS(checkExpr(t, envs, ebcon("[]", {}), tList(tInt())), TypeError);
}

TEST_CASE("holes check at their recorded type") {
  DataDeclTable t = prelude();
  auto mk = [](TypePtr ty) {
    auto info = std::make_shared<HoleInfo>();
    std::const_pointer_cast<HoleInfo>(info)->id = 1;
    std::const_pointer_cast<HoleInfo>(info)->kind = HoleKind::Exit;
    std::const_pointer_cast<HoleInfo>(info)->targetType = std::move(ty);
    return ehole(info);
  };
  TypeEnvs envs;
  TypePtr exitTy = funType(tList(tInt()), tBool());
  checkExpr(t, envs, mk(exitTy), exitTy);
  CHECK_THROWS_AS(checkExpr(t, envs, mk(exitTy), funType(tInt(), tBool())), TypeError);
}

TEST_CASE("inference covers application chains and case") {
  DataDeclTable t = prelude();
  TypeEnvs envs;
  envs.uni["f"] = funType(tInt(), funType(tBool(), tChar()));
  envs.uni["n"] = tInt();
  envs.uni["b"] = tBool();
  CHECK(typeEq(inferExpr(t, envs, eapp(eapp(evar("f"), evar("n")), evar("b"))), tChar()));
  CHECK_THROWS_AS(inferExpr(t, envs, eapp(evar("n"), evar("b"))), TypeError);
  CHECK(typeEq(inferExpr(t, envs, econ("S", {evar("n")})), tInt()));
  CHECK(typeEq(
      inferExpr(t, envs, ecase(evar("b"), {{pcon("True"), evar("n")}, {pcon("False"), evar("n")}})),
      tInt()));
}
