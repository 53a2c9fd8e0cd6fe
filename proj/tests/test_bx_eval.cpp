#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bx/bx_eval.hpp"
#include "bx/surface.hpp"
#include "bx/typecheck.hpp"

using namespace bx;

namespace {

// Reference bidirectional append: nil branch absorbs surplus into ys,
// shrinking views switch back to nil via the empty-list reconciliation.
const char* kAppendB = R"(
null : [Int] -> Bool
null s = case s of { [] -> True ; w : ws -> False }

appendB : BX [Int] -> BX [Int] -> BX [Int]
appendB xs ys = case* xs of
  { [] -> ys
      with (\v -> True)
      by (\s v -> [])
  ; a : x -> a :* appendB x ys
      with (\v -> not (null v))
      by (\s v -> s)
  }

uncurryB : (BX [Int] -> BX [Int] -> BX [Int]) -> BX ([Int], [Int]) -> BX [Int]
uncurryB f s = case* s of
  { (x, y) -> f x y with (\v -> True) by (\s v -> s) }

#entry uncurryB appendB
)";

// Append against a constant second list: changes must preserve the suffix.
const char* kAppendBc = R"(
null : [Char] -> Bool
null s = case s of { [] -> True ; w : ws -> False }

eqLen : [Char] -> [Char] -> Bool
eqLen xs ys = case xs of
  { [] -> null ys
  ; a : x -> case ys of { [] -> False ; b : y -> eqLen x y }
  }

appendBc : BX [Char] -> [Char] -> BX [Char]
appendBc xs ys = case* xs of
  { [] -> !ys
      with (\v -> eqLen v ys)
      by (\s v -> [])
  ; a : x -> a :* appendBc x ys
      with (\v -> not (eqLen v ys))
      by (\s v -> case v of { w : ws -> [w] })
  }

appendBcS : BX [Char] -> BX [Char]
appendBcS xs = appendBc xs ";"

#entry appendBcS
)";

SynthesisInput load(const char* text) { return toSynthesisInput(parseSpec(text)); }

FOPtr nats(std::initializer_list<long> xs) {
  std::vector<FOPtr> elems;
  for (long x : xs) elems.push_back(foNat(x));
  return foList(elems);
}

struct AppendFixture {
  SynthesisInput in = load(kAppendB);
  Evaluator ev{in.program};
  ResPtr body;  // residual of `appendB xs ys`

  AppendFixture() {
    auto v = ev.eval(eapp(eapp(evar("appendB"), evar("xs")), evar("ys")));
    body = std::get<VRes>(v->node).r;
  }
};

}  // namespace

TEST_CASE("patMatch/patBuild: pattern semantics") {
  auto consPat = pcon(":", {pvar("a"), pvar("x")});
  auto mu = patMatch(consPat, nats({6, 2}));
  REQUIRE(mu.has_value());
  CHECK(foEq(mu->at("a"), foNat(6)));
  CHECK(foEq(mu->at("x"), nats({2})));

  // Variable pattern binds anything; nil rejects cons.
  auto any = patMatch(pvar("y"), foNat(3));
  REQUIRE(any.has_value());
  CHECK(foEq(any->at("y"), foNat(3)));
  CHECK(!patMatch(pcon("[]", {}), nats({1})).has_value());

  // Left inverse on the worked example, and on nil.
  CHECK(foEq(patBuild(consPat, {{"a", foNat(6)}, {"x", nats({2})}}), nats({6, 2})));
  CHECK(foEq(patBuild(pcon("[]", {}), {}), foList({})));
  CHECK_THROWS_AS(patBuild(consPat, {{"a", foNat(6)}}), MissingBinding);

  // Round trip: match then build is the identity on the value.
  auto deep = pcon(":", {pvar("a"), pcon(":", {pvar("b"), pvar("r")})});
  auto u = nats({7, 8, 9});
  auto m2 = patMatch(deep, u);
  REQUIRE(m2.has_value());
  CHECK(foEq(patBuild(deep, *m2), u));
}

TEST_CASE("environment algebra") {
  ValueEnv ys = {{"ys", foList({})}};
  ValueEnv xs = {{"xs", nats({6, 2})}};
  auto merged = envMerge(ys, xs);
  CHECK(merged.size() == 2);
  CHECK(foEq(merged.at("ys"), foList({})));
  CHECK(showValueEnv(envMerge(merged, merged)) == showValueEnv(merged));  // idempotent
  CHECK_THROWS_AS(envMerge({{"x", foNat(1)}}, {{"x", foNat(2)}}), MergeConflict);

  ValueEnv all = {{"ys", foList({})}, {"a", foNat(6)}, {"x", nats({2})}};
  auto [l, r] = envSplit(all, {"ys"}, {"a", "x"});
  CHECK(l.size() == 1);
  CHECK(r.size() == 2);
  CHECK(showValueEnv(envMerge(l, r)) == showValueEnv(all));  // recombination
  auto [el, er] = envSplit({}, {"p"}, {"q"});
  CHECK(el.empty());
  CHECK(er.empty());
  CHECK_THROWS_AS(envSplit(all, {"ys"}, {"a"}), DomainViolation);
  CHECK_THROWS_AS(envSplit(all, {"ys", "a"}, {"a", "x"}), DomainViolation);

  ValueEnv upd = {{"a", foNat(6)}, {"x", nats({2})}};
  ValueEnv base = {{"a", foNat(1)}, {"x", nats({2, 3})}};
  auto def = envDefault(upd, base);
  CHECK(foEq(def.at("a"), foNat(6)));
  CHECK(foEq(def.at("x"), nats({2})));
  auto def2 = envDefault({}, base);
  CHECK(showValueEnv(def2) == showValueEnv(base));
  auto def3 = envDefault(upd, {{"extra", foNat(9)}});
  CHECK(def3.size() == 3);  // domain is the union

  CHECK_THROWS_AS(envDisjointUnion({{"x", foNat(1)}}, {{"x", foNat(1)}}), DomainViolation);
}

TEST_CASE("getT: variables and the worked append trace") {
  AppendFixture f;

  // A variable is looked up with an empty trace.
  auto r0 = getT(f.ev, {{"x", foNat(5)}}, rvar("x"));
  CHECK(foEq(r0.value, foNat(5)));
  CHECK(std::holds_alternative<TEps>(r0.trace->node));
  CHECK_THROWS_AS(getT(f.ev, {}, rvar("nope")), MissingBinding);

  // The worked example: get over {xs=[6,2], ys=[]}.
  auto r = getT(f.ev, {{"xs", nats({6, 2})}, {"ys", foList({})}}, f.body);
  CHECK(foEq(r.value, nats({6, 2})));
  CHECK(showTrace(r.trace) == "Br(eps,1,[eps,Br(eps,1,[eps,Br(eps,0,eps)])])");
}

TEST_CASE("getT: failed exit assertion and unmatched scrutinee") {
  std::vector<Definition> none;
  Evaluator ev(none);

  // case* x of { w -> w with (\v -> False) by (\s v -> s) }
  auto bad = ev.eval(ebcase(
      evar("x"), {{pvar("w"), evar("w"), elam("v", econ("False")),
                   elam("s", elam("v", evar("s")))}}));
  CHECK_THROWS_AS(getT(ev, {{"x", foNat(5)}}, std::get<VRes>(bad->node).r),
                  ExitAssertionFailed);

  // case* x of { [] -> ... } scrutinized at a cons value.
  auto nilOnly = ev.eval(ebcase(
      evar("x"), {{pcon("[]", {}), ebcon("[]"), elam("v", econ("True")),
                   elam("s", elam("v", evar("s")))}}));
  CHECK_THROWS_AS(getT(ev, {{"x", nats({1})}}, std::get<VRes>(nilOnly->node).r),
                  NoBranchMatches);
}

TEST_CASE("putT: acceptability on the append body") {
  AppendFixture f;
  ValueEnv mu = {{"xs", nats({1, 2, 3})}, {"ys", nats({4, 5})}};
  auto got = getT(f.ev, mu, f.body);
  auto back = putT(f.ev, mu, f.body, got.value);
  CHECK(showValueEnv(back.env) == showValueEnv(mu));
  // Trace coherence: the put took the same branches the get did.
  CHECK(showTrace(back.trace) == showTrace(got.trace));
}

TEST_CASE("putT: the worked guided example, and untraced agreement") {
  AppendFixture f;
  ValueEnv orig = {{"xs", nats({1, 2, 3})}, {"ys", nats({4, 5})}};
  ValueEnv updated = {{"xs", nats({6, 2})}, {"ys", foList({})}};

  // The guide is the get-trace of the expected updated source.
  auto guide = getT(f.ev, updated, f.body).trace;
  auto guided = putT(f.ev, orig, f.body, nats({6, 2}), guide);
  CHECK(showValueEnv(guided.env) == "{xs = [6, 2], ys = []}");
  CHECK(showTrace(guided.trace) == showTrace(guide));

  // Untraced mode reaches the same updated environment on its own.
  auto untraced = putT(f.ev, orig, f.body, nats({6, 2}));
  CHECK(showValueEnv(untraced.env) == showValueEnv(guided.env));
  // ... and its trace is replayed by a get over the updated environment.
  auto replay = getT(f.ev, untraced.env, f.body);
  CHECK(showTrace(replay.trace) == showTrace(untraced.trace));
}

TEST_CASE("putT: constructor and trace mismatches") {
  AppendFixture f;
  // Updated view [] against the residual (a :* ...).
  auto cons = rbcon(":", {rvar("a"), rvar("x")});
  CHECK_THROWS_AS(putT(f.ev, {{"a", foNat(1)}, {"x", foList({})}}, cons, foList({})),
                  PutConMismatch);

  // A guide whose shape cannot have come from this residual.
  ValueEnv mu = {{"xs", nats({1})}, {"ys", foList({})}};
  CHECK_THROWS_AS(putT(f.ev, mu, f.body, nats({1}), tEps()), TraceMismatch);
  CHECK_THROWS_AS(putT(f.ev, mu, rvar("xs"), nats({1}), tBr(tEps(), 0, tEps())),
                  TraceMismatch);
}

TEST_CASE("runGet/runPut: uncurried append behaves as advertised") {
  auto in = load(kAppendB);
  auto s = foPair(nats({1, 2}), nats({3, 4}));

  CHECK(foEq(runGet(in, in.entry, s), nats({1, 2, 3, 4})));

  // Shorter view: the second list empties, the first shrinks.
  CHECK(foEq(runPut(in, in.entry, s, nats({5})), foPair(nats({5}), foList({}))));
  // Longer view: surplus flows into the second list.
  CHECK(foEq(runPut(in, in.entry, s, nats({5, 6, 7, 8, 9})),
             foPair(nats({5, 6}), nats({7, 8, 9}))));
  // Same length: in-place update.
  CHECK(foEq(runPut(in, in.entry, s, nats({5, 6, 7, 8})),
             foPair(nats({5, 6}), nats({7, 8}))));

  // Consistency: get after put gives back the updated view.
  auto s2 = runPut(in, in.entry, s, nats({5}));
  CHECK(foEq(runGet(in, in.entry, s2), nats({5})));
}

TEST_CASE("runGet/runPut: append against a lifted constant") {
  auto in = load(kAppendBc);

  CHECK(foEq(runGet(in, in.entry, foString("apple")), foString("apple;")));
  CHECK(foEq(runPut(in, in.entry, foString("apple"), foString("pineapple;")),
             foString("pineapple")));
  CHECK(foEq(runPut(in, in.entry, foString("apple"), foString("plum;")), foString("plum")));
  // The constant suffix is not updatable.
  CHECK_THROWS_AS(runPut(in, in.entry, foString("apple"), foString("apple.")), LiftMismatch);
}

TEST_CASE("runGet/runPut: entry type checking and source defaulting") {
  auto in = load(kAppendB);
  // A two-argument bidirectional function is not a lens entry by itself.
  CHECK_THROWS_AS(runGet(in, evar("appendB"), nats({1})), EntryTypeError);
  CHECK_THROWS_AS(runGet(in, evar("null"), nats({1})), EntryTypeError);

  // An entry that ignores its source keeps the source on put.
  auto constSpec = load(R"(
constB : BX [Int] -> BX [Int]
constB xs = ![5]

#entry constB
)");
  CHECK(foEq(runGet(constSpec, constSpec.entry, nats({9, 9})), nats({5})));
  CHECK(foEq(runPut(constSpec, constSpec.entry, nats({9, 9}), nats({5})), nats({9, 9})));
  CHECK_THROWS_AS(runPut(constSpec, constSpec.entry, nats({9, 9}), nats({6})), LiftMismatch);
}

TEST_CASE("putT: switching into a branch via reconciliation details") {
  // A two-branch case over Either to exercise ReconPatternMismatch: the
  // reconciliation function returns a Left value while switching to the
  // Right branch.
  const char* text = R"(
isL : Either Int Int -> Bool
isL e = case e of { Left a -> True ; Right b -> False }

flipB : BX (Either Int Int) -> BX (Either Int Int)
flipB e = case* e of
  { Left a -> Right* a
      with (\v -> case v of { Left x -> False ; Right y -> True })
      by (\s v -> case v of { Right y -> Left y ; Left x -> Right x })
  ; Right b -> Left* b
      with (\v -> case v of { Left x -> True ; Right y -> False })
      by (\s v -> s)
  }

#entry flipB
)";
  auto in = load(text);
  auto L = [](long n) { return fo("Left", {foNat(n)}); };
  auto R = [](long n) { return fo("Right", {foNat(n)}); };

  CHECK(foEq(runGet(in, in.entry, L(3)), R(3)));
  CHECK(foEq(runGet(in, in.entry, R(4)), L(4)));
  // In-place update, no switch.
  CHECK(foEq(runPut(in, in.entry, L(3), R(7)), L(7)));
  // Switch Right->Left: the first branch's reconciliation rebuilds a Left
  // scrutinee from the view, so the switch succeeds.
  CHECK(foEq(runPut(in, in.entry, R(4), R(8)), L(8)));
  // Switch Left->Right: the second branch's reconciliation (\s v -> s)
  // returns the original Left value, which fails its Right pattern.
  CHECK_THROWS_AS(runPut(in, in.entry, L(3), L(9)), ReconPatternMismatch);
}
