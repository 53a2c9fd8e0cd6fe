#pragma once

// Weighted lazy nondeterministic search. A SearchStream<T> emits (cost,
// value) pairs in non-decreasing cost order and does no enumeration work
// until pulled. Streams are single-consumer: next() advances shared state.
// Combinators that expand one value into a whole stream take thunks, so a
// fresh stream is built per expansion (streams are not restartable; use
// StreamCache to share one enumeration between several consumers).
//
// Scheduling is Dijkstra-style: every suspended sub-stream carries a lower
// bound for its next emission (its weight plus its last emitted cost), and
// the smallest bound is forced first. Ties break deterministically:
// alternatives in their given left-to-right order, already-forced items
// before further forcing.

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

namespace bx {

// Internal control-flow signal thrown when the ambient deadline (installed
// by takeWithin) passes while a stream is grinding between emissions.
struct TimeoutSignal {};

namespace search_detail {

struct Ambient {
  long costCap;
  bool hasDeadline;
  std::chrono::steady_clock::time_point deadline;
  unsigned tick;
};

inline Ambient& ambient() {
  thread_local Ambient a{std::numeric_limits<long>::max(), false, {}, 0};
  return a;
}

inline long costCap() { return ambient().costCap; }

inline void checkCancel() {
  auto& a = ambient();
  if (!a.hasDeadline) return;
  if ((++a.tick & 0xFF) != 0) return;  // amortize the clock read
  if (std::chrono::steady_clock::now() > a.deadline) throw TimeoutSignal{};
}

// Forcing a suspended sub-stream recurses through nested next() calls; for a
// sane grammar the nesting of the first emission is bounded by its cost, so
// runaway depth means an unproductive cycle (e.g. S ::= S). Cut it off
// before the call stack overflows; treated as search-budget exhaustion.
inline int& forceDepth() {
  thread_local int depth = 0;
  return depth;
}

struct ForceGuard {
  ForceGuard() {
    if (forceDepth() >= 5000) throw TimeoutSignal{};
    ++forceDepth();
  }
  ~ForceGuard() { --forceDepth(); }
};

// Charges a fixed cost offset for the duration of a nested pull: while a
// combinator asks an inner stream for items it will re-emit at `+delta`,
// inner work beyond cap-delta can never surface, so the cap shrinks with the
// accumulated offset. Without this, grammars that recurse through their
// environment (for example Bool -> Bool connectives) explore the full cap at
// every nesting level and the first "no more items" answer never returns.
struct CapTighten {
  long saved;
  explicit CapTighten(long delta) : saved(ambient().costCap) {
    ambient().costCap = saved - delta;
  }
  ~CapTighten() { ambient().costCap = saved; }
};

// RAII scope for takeWithin's budget/deadline (restores the outer scope).
struct AmbientGuard {
  Ambient saved;
  AmbientGuard(long cap, std::chrono::steady_clock::time_point dl) : saved(ambient()) {
    ambient() = Ambient{cap, true, dl, 0};
  }
  ~AmbientGuard() { ambient() = saved; }
};

}  // namespace search_detail

template <typename T>
struct SItem {
  long cost;
  T value;
};

template <typename T>
struct StreamImpl {
  virtual ~StreamImpl() = default;
  virtual std::optional<SItem<T>> next() = 0;
};

template <typename T>
class SearchStream {
 public:
  using Item = SItem<T>;

  SearchStream() = default;  // empty stream
  explicit SearchStream(std::shared_ptr<StreamImpl<T>> p) : p_(std::move(p)) {}

  std::optional<Item> next() {
    if (!p_) return std::nullopt;
    return p_->next();
  }

 private:
  std::shared_ptr<StreamImpl<T>> p_;
};

// --------------------------------------------------------------------------
// Basic constructors
// --------------------------------------------------------------------------

template <typename T>
SearchStream<T> emptyS() {
  return SearchStream<T>();
}

namespace search_detail {

template <typename T>
struct VecImpl : StreamImpl<T> {
  std::vector<SItem<T>> items;
  size_t idx = 0;
  explicit VecImpl(std::vector<SItem<T>> xs) : items(std::move(xs)) {
    std::stable_sort(items.begin(), items.end(),
                     [](const SItem<T>& a, const SItem<T>& b) { return a.cost < b.cost; });
  }
  std::optional<SItem<T>> next() override {
    if (idx >= items.size()) return std::nullopt;
    return items[idx++];
  }
};

template <typename T>
struct DelayImpl : StreamImpl<T> {
  std::function<SearchStream<T>()> make;
  std::optional<SearchStream<T>> forced;
  explicit DelayImpl(std::function<SearchStream<T>()> f) : make(std::move(f)) {}
  std::optional<SItem<T>> next() override {
    ForceGuard guard;
    if (!forced) forced = make();
    return forced->next();
  }
};

}  // namespace search_detail

template <typename T>
SearchStream<T> pureS(T value, long cost = 0) {
  return SearchStream<T>(std::make_shared<search_detail::VecImpl<T>>(
      std::vector<SItem<T>>{{cost, std::move(value)}}));
}

template <typename T>
SearchStream<T> fromItems(std::vector<SItem<T>> items) {
  return SearchStream<T>(std::make_shared<search_detail::VecImpl<T>>(std::move(items)));
}

// Laziness knot-tyer for recursive grammars.
template <typename T>
SearchStream<T> delayS(std::function<SearchStream<T>()> make) {
  return SearchStream<T>(std::make_shared<search_detail::DelayImpl<T>>(std::move(make)));
}

// --------------------------------------------------------------------------
// choose: weighted alternatives
// --------------------------------------------------------------------------

template <typename T>
struct Alternative {
  long weight;
  std::function<SearchStream<T>()> make;
};

namespace search_detail {

template <typename T>
struct ChooseImpl : StreamImpl<T> {
  struct Alt {
    long weight;
    std::function<SearchStream<T>()> make;
    std::optional<SearchStream<T>> stream;
  };
  // kind 0: a forced item ready for emission; kind 1: an alternative whose
  // next emission costs at least `bound`.
  struct QE {
    long bound;
    int alt;
    int kind;
    std::optional<T> value;
  };
  struct Cmp {
    bool operator()(const QE& a, const QE& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.alt != b.alt) return a.alt > b.alt;
      return a.kind > b.kind;
    }
  };

  std::vector<Alt> alts;
  std::priority_queue<QE, std::vector<QE>, Cmp> q;

  explicit ChooseImpl(std::vector<Alternative<T>> as) {
    for (size_t i = 0; i < as.size(); ++i) {
      alts.push_back(Alt{as[i].weight, std::move(as[i].make), std::nullopt});
      if (as[i].weight <= costCap()) {
        q.push(QE{alts.back().weight, static_cast<int>(i), 1, std::nullopt});
      }
    }
  }

  std::optional<SItem<T>> next() override {
    ForceGuard guard;
    while (!q.empty()) {
      checkCancel();
      QE e = q.top();
      q.pop();
      if (e.bound > costCap()) continue;  // cap may tighten after pushes
      if (e.kind == 0) return SItem<T>{e.bound, std::move(*e.value)};
      Alt& a = alts[static_cast<size_t>(e.alt)];
      std::optional<SItem<T>> it;
      {
        CapTighten tight(a.weight);
        if (!a.stream) a.stream = a.make();
        it = a.stream->next();
      }
      if (!it) continue;  // alternative exhausted
      long cost = a.weight + it->cost;
      if (cost <= costCap()) {
        q.push(QE{cost, e.alt, 0, std::move(it->value)});
        q.push(QE{cost, e.alt, 1, std::nullopt});  // next item costs >= this
      }
    }
    return std::nullopt;
  }
};

}  // namespace search_detail

template <typename T>
SearchStream<T> choose(std::vector<Alternative<T>> alternatives) {
  return SearchStream<T>(
      std::make_shared<search_detail::ChooseImpl<T>>(std::move(alternatives)));
}

// --------------------------------------------------------------------------
// map / addCost / bind / products
// --------------------------------------------------------------------------

namespace search_detail {

template <typename T, typename U>
struct MapImpl : StreamImpl<U> {
  SearchStream<T> inner;
  std::function<U(const T&)> f;
  long delta;
  MapImpl(SearchStream<T> s, std::function<U(const T&)> g, long d)
      : inner(std::move(s)), f(std::move(g)), delta(d) {}
  std::optional<SItem<U>> next() override {
    ForceGuard guard;
    std::optional<SItem<T>> it;
    {
      CapTighten tight(delta);
      it = inner.next();
    }
    if (!it) return std::nullopt;
    return SItem<U>{it->cost + delta, f(it->value)};
  }
};

// Dependent product: expand every source item into its own weighted stream
// and merge the expansions cost-first.
template <typename T, typename U>
struct BindImpl : StreamImpl<U> {
  struct Child {
    SearchStream<U> stream;
    long weight;
  };
  struct QE {
    long bound;
    int seq;   // creation order: source first, then children in source order
    int kind;  // 0 item, 1 child pending, 2 source pending
    int child;
    std::optional<U> value;
  };
  struct Cmp {
    bool operator()(const QE& a, const QE& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.seq != b.seq) return a.seq > b.seq;
      return a.kind > b.kind;
    }
  };

  SearchStream<T> source;
  std::function<SearchStream<U>(const T&)> f;
  std::vector<Child> children;
  std::priority_queue<QE, std::vector<QE>, Cmp> q;
  int nextSeq = 1;

  BindImpl(SearchStream<T> s, std::function<SearchStream<U>(const T&)> g)
      : source(std::move(s)), f(std::move(g)) {
    q.push(QE{0, 0, 2, -1, std::nullopt});
  }

  std::optional<SItem<U>> next() override {
    ForceGuard guard;
    while (!q.empty()) {
      checkCancel();
      QE e = q.top();
      q.pop();
      if (e.bound > costCap()) continue;  // cap may tighten after pushes
      if (e.kind == 0) return SItem<U>{e.bound, std::move(*e.value)};
      if (e.kind == 2) {
        auto it = source.next();
        if (!it) continue;
        if (it->cost > costCap()) continue;  // all further source items cost more
        int seq = nextSeq++;
        children.push_back(Child{f(it->value), it->cost});
        q.push(QE{it->cost, seq, 1, static_cast<int>(children.size()) - 1, std::nullopt});
        q.push(QE{it->cost, 0, 2, -1, std::nullopt});
        continue;
      }
      Child& c = children[static_cast<size_t>(e.child)];
      std::optional<SItem<U>> it;
      {
        CapTighten tight(c.weight);
        it = c.stream.next();
      }
      if (!it) continue;
      long cost = c.weight + it->cost;
      if (cost <= costCap()) {
        q.push(QE{cost, e.seq, 0, e.child, std::move(it->value)});
        q.push(QE{cost, e.seq, 1, e.child, std::nullopt});
      }
    }
    return std::nullopt;
  }
};

}  // namespace search_detail

template <typename T, typename F>
auto mapS(SearchStream<T> s, F f) -> SearchStream<decltype(f(std::declval<const T&>()))> {
  using U = decltype(f(std::declval<const T&>()));
  return SearchStream<U>(std::make_shared<search_detail::MapImpl<T, U>>(
      std::move(s), std::function<U(const T&)>(std::move(f)), 0));
}

template <typename T>
SearchStream<T> addCost(SearchStream<T> s, long delta) {
  return SearchStream<T>(std::make_shared<search_detail::MapImpl<T, T>>(
      std::move(s), std::function<T(const T&)>([](const T& x) { return x; }), delta));
}

namespace search_detail {
template <typename S>
struct StreamValue;
template <typename U>
struct StreamValue<SearchStream<U>> {
  using type = U;
};
}  // namespace search_detail

// f is called once per source item and must return a fresh stream each time;
// emitted cost = source item cost + expansion cost.
template <typename T, typename F>
auto bindS(SearchStream<T> s, F f) -> decltype(f(std::declval<const T&>())) {
  using Stream = decltype(f(std::declval<const T&>()));
  using U = typename search_detail::StreamValue<Stream>::type;
  return Stream(std::make_shared<search_detail::BindImpl<T, U>>(
      std::move(s), std::function<Stream(const T&)>(std::move(f))));
}

// All-ways product: picks one value per maker, cost = sum. Makers are forced
// lazily, left to right.
template <typename T>
SearchStream<std::vector<T>> productS(
    std::vector<std::function<SearchStream<T>()>> makers) {
  SearchStream<std::vector<T>> acc = pureS(std::vector<T>{});
  for (size_t i = 0; i < makers.size(); ++i) {
    auto maker = makers[i];
    acc = bindS(std::move(acc), [maker](const std::vector<T>& sofar) {
      return mapS(maker(), [sofar](const T& x) {
        std::vector<T> out = sofar;
        out.push_back(x);
        return out;
      });
    });
  }
  return acc;
}

// --------------------------------------------------------------------------
// StreamCache: share one enumeration between several sequential consumers
// --------------------------------------------------------------------------

template <typename T>
class StreamCache {
 public:
  explicit StreamCache(SearchStream<T> master) : st_(std::make_shared<State>()) {
    st_->master = std::move(master);
  }

  // A fresh view replaying the cache, pulling the master as needed.
  SearchStream<T> view() const {
    return SearchStream<T>(std::make_shared<View>(st_));
  }

 private:
  struct State {
    SearchStream<T> master;
    std::vector<SItem<T>> seen;
    bool done = false;
  };
  struct View : StreamImpl<T> {
    std::shared_ptr<State> st;
    size_t idx = 0;
    explicit View(std::shared_ptr<State> s) : st(std::move(s)) {}
    std::optional<SItem<T>> next() override {
      if (idx < st->seen.size()) return st->seen[idx++];
      if (st->done) return std::nullopt;
      auto it = st->master.next();
      if (!it) {
        st->done = true;
        return std::nullopt;
      }
      st->seen.push_back(*it);
      ++idx;
      return it;
    }
  };
  std::shared_ptr<State> st_;
};

// --------------------------------------------------------------------------
// takeWithin
// --------------------------------------------------------------------------

template <typename T>
struct TakeResult {
  std::vector<T> items;
  bool timedOut = false;
};

template <typename T>
struct TakeItemsResult {
  std::vector<SItem<T>> items;
  bool timedOut = false;
};

// All items of cost <= budget, in emission order and with their costs,
// stopping (with the timeout marker set) once the wall-clock deadline
// passes. The stream handle is copied, but the underlying state is shared
// and advanced.
template <typename T>
TakeItemsResult<T> takeItemsWithin(SearchStream<T> s, long budget, double seconds) {
  TakeItemsResult<T> out;
  if (seconds <= 0) {
    out.timedOut = true;
    return out;
  }
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(seconds));
  search_detail::AmbientGuard guard(budget, deadline);
  try {
    while (auto it = s.next()) {
      if (it->cost > budget) break;
      if (std::chrono::steady_clock::now() > deadline) {
        out.timedOut = true;
        break;
      }
      out.items.push_back(std::move(*it));
    }
  } catch (const TimeoutSignal&) {
    out.timedOut = true;
  }
  return out;
}

// Values only, same semantics as takeItemsWithin.
template <typename T>
TakeResult<T> takeWithin(SearchStream<T> s, long budget, double seconds) {
  auto r = takeItemsWithin(std::move(s), budget, seconds);
  TakeResult<T> out;
  out.timedOut = r.timedOut;
  out.items.reserve(r.items.size());
  for (auto& it : r.items) out.items.push_back(std::move(it.value));
  return out;
}

}  // namespace bx
