#include "bx/filtering.hpp"

#include <sstream>
#include <utility>

#include "bx/eval.hpp"

namespace bx {

namespace {

bool envEq(const ValueEnv& a, const ValueEnv& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  for (auto ib = b.begin(); ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !foEq(ia->second, ib->second)) return false;
  }
  return true;
}

}  // namespace

std::string showBranchEvent(const BranchEvent& ev) {
  std::ostringstream os;
  os << "BR site=" << ev.siteId << " taken=" << ev.takenBranch << " orig=";
  if (ev.originalBranch) {
    os << *ev.originalBranch;
  } else {
    os << "-";
  }
  return os.str();
}

std::string showExitConstraint(const ExitConstraint& c) {
  std::ostringstream os;
  os << "CONSTR hole=" << c.holeId << " expect=" << (c.expected ? "true" : "false")
     << " env=" << showValueEnv(c.bindingEnv);
  return os.str();
}

CandidateContext::CandidateContext(const std::vector<Definition>& program, const ExprPtr& entry)
    : ev(program) {
  ev.enableHoleSentinels(true);
  auto [E, x] = residualizeEntry(ev, entry);
  res = std::move(E);
  srcVar = std::move(x);
}

GetTraceResult computeGetTrace(CandidateContext& cx, const FOPtr& sPrime) {
  GetTraceResult out;
  BxEval bx(cx.ev, [&out](const ExitHoleEvent& ev) { out.holeEvents.push_back(ev); });
  try {
    auto r = bx.get({{cx.srcVar, sPrime}}, cx.res);
    out.value = r.value;
    out.trace = r.trace;
    out.ok = true;
  } catch (const BxError& e) {
    out.ok = false;
    out.reason = e.what();
    out.holeEvents.clear();  // a failed run constrains nothing
  }
  return out;
}

ReconTestResult testReconCandidates(CandidateContext& cx, const Example& ex,
                                    const TracePtr& guide) {
  ReconTestResult out;
  BxEval bx(
      cx.ev, [&out](const ExitHoleEvent& ev) { out.holeEvents.push_back(ev); },
      [&out](const BranchEvent& ev) { out.events.push_back(ev); });
  try {
    auto r = bx.put({{cx.srcVar, ex.source}}, cx.res, ex.updatedView, guide);
    auto it = r.env.find(cx.srcVar);
    out.rebuiltSource = it != r.env.end() ? it->second : ex.source;
    if (foEq(out.rebuiltSource, ex.updatedSource)) {
      out.pass = true;
    } else {
      out.reason = "rebuilt source " + showFO(out.rebuiltSource) + " differs from " +
                   showFO(ex.updatedSource);
    }
  } catch (const BxError& e) {
    out.pass = false;
    out.reason = e.what();
  }
  return out;
}

std::vector<ExitConstraint> extractExitConstraints(const std::vector<ExitHoleEvent>& events) {
  std::vector<ExitConstraint> out;
  for (const auto& ev : events) {
    ExitConstraint c{ev.holeId, ev.bindingEnv, ev.expected};
    bool dup = false;
    for (const auto& seen : out) {
      if (seen.holeId == c.holeId && seen.expected == c.expected &&
          envEq(seen.bindingEnv, c.bindingEnv)) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(c));
  }
  return out;
}

std::optional<bool> evalExitCandidate(const std::vector<Definition>& program, const ExprPtr& body,
                                      const ValueEnv& env) {
  try {
    ExprPtr closed = body;
    for (const auto& [x, u] : env) closed = substValue(closed, x, vfo(u));
    Evaluator ev(program);
    auto v = ev.eval(closed);
    auto u = valueToFO(v);
    if (u->con == "True" && u->args.empty()) return true;
    if (u->con == "False" && u->args.empty()) return false;
    return std::nullopt;
  } catch (const BxError&) {
    return std::nullopt;
  }
}

SearchStream<ExitAssignment> solveExitHoles(
    const std::vector<Definition>& program, const std::vector<ExitConstraint>& constraints,
    const std::map<int, std::function<SearchStream<ExprPtr>()>>& candidates) {
  std::map<int, std::vector<ExitConstraint>> byHole;
  for (const auto& c : constraints) byHole[c.holeId].push_back(c);
  for (const auto& [id, cs] : byHole) {
    if (candidates.find(id) == candidates.end()) return emptyS<ExitAssignment>();
  }

  std::vector<int> ids;
  std::vector<std::function<SearchStream<ExprPtr>()>> makers;
  for (const auto& [id, make] : candidates) {
    ids.push_back(id);
    auto it = byHole.find(id);
    if (it == byHole.end()) {
      // Unconstrained: the single cheapest candidate, found on first demand.
      auto inner = make;
      makers.push_back([inner]() -> SearchStream<ExprPtr> {
        return delayS<ExprPtr>([inner]() -> SearchStream<ExprPtr> {
          auto s = inner();
          auto first = s.next();
          if (!first) return emptyS<ExprPtr>();
          return fromItems<ExprPtr>({*first});
        });
      });
    } else {
      auto inner = make;
      std::vector<ExitConstraint> cs = it->second;
      makers.push_back([inner, cs, program]() -> SearchStream<ExprPtr> {
        return bindS(inner(), [cs, program](const ExprPtr& e) -> SearchStream<ExprPtr> {
          for (const auto& c : cs) {
            auto got = evalExitCandidate(program, e, c.bindingEnv);
            if (!got || *got != c.expected) return emptyS<ExprPtr>();
          }
          return pureS(e);
        });
      });
    }
  }

  return mapS(productS<ExprPtr>(makers), [ids](const std::vector<ExprPtr>& picks) {
    ExitAssignment a;
    for (size_t i = 0; i < picks.size(); ++i) a[ids[i]] = picks[i];
    return a;
  });
}

FinalCheckResult finalCheck(const SynthesisInput& in, const ProgramSketch& candidate) {
  SynthesisInput cand = in;
  cand.program = candidate.defs;
  cand.typingEnv = candidate.env;

  FinalCheckResult out;
  for (size_t i = 0; i < in.examples.size(); ++i) {
    const Example& ex = in.examples[i];
    const std::string tag = "example " + std::to_string(i);
    try {
      FOPtr sNew = runPut(cand, in.entry, ex.source, ex.updatedView);
      if (!foEq(sNew, ex.updatedSource)) {
        out.reason = tag + ": put produced " + showFO(sNew) + ", expected " +
                     showFO(ex.updatedSource);
        return out;
      }
      Evaluator evO(in.program);
      FOPtr original = valueToFO(evO.applyAll(evO.eval(in.entry), {ex.source}));
      FOPtr got = runGet(cand, in.entry, ex.source);
      if (!foEq(got, original)) {
        out.reason = tag + ": get produced " + showFO(got) +
                     ", the unidirectional program produces " + showFO(original);
        return out;
      }
      FOPtr vBack = runGet(cand, in.entry, ex.updatedSource);
      if (!foEq(vBack, ex.updatedView)) {
        out.reason = tag + ": get on the updated source produced " + showFO(vBack) +
                     ", expected " + showFO(ex.updatedView);
        return out;
      }
    } catch (const BxError& e) {
      out.reason = tag + ": " + e.what();
      return out;
    }
  }
  out.accepted = true;
  return out;
}

}  // namespace bx
