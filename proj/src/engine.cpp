#include "semconf/engine.hpp"

#include "semconf/frontend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

namespace semconf {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::NoPA: return "nopa";
    case Mode::PA: return "pa";
    case Mode::Hybrid: return "hybrid";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "nopa") return Mode::NoPA;
  if (s == "pa") return Mode::PA;
  if (s == "hybrid") return Mode::Hybrid;
  throw Error("unknown mode '" + std::string(s) + "' (expected nopa, pa or hybrid)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Timeout: return "timeout";
  }
  return "?";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "true") return Verdict::True;
  if (s == "false") return Verdict::False;
  if (s == "timeout") return Verdict::Timeout;
  throw Error("unknown verdict '" + std::string(s) + "'");
}

std::string_view to_string(MissRef::Reason r) {
  return r == MissRef::Reason::EmptyPts ? "empty-pts" : "unresolved-call";
}

MissRef::Reason parse_reason(std::string_view s) {
  if (s == "empty-pts") return MissRef::Reason::EmptyPts;
  if (s == "unresolved-call") return MissRef::Reason::UnresolvedCall;
  throw Error("unknown miss-reference reason '" + std::string(s) + "'");
}

std::string StateElementKey::str() const {
  switch (kind) {
    case ElementKind::LV: return local;
    case ElementKind::IFR: return local + ".<" + declaring + ": " + field_type + " " + field + ">";
    case ElementKind::AR: return local + "[" + index.text + "]";
    case ElementKind::SFR: return "<" + declaring + ": " + field_type + " " + field + ">";
  }
  return {};
}

StateElementKey ElementKeys::local(const std::string& name) const {
  StateElementKey key;
  key.kind = ElementKind::LV;
  key.local = name;
  return key;
}

StateElementKey ElementKeys::field(const MethodId& m, const std::string& base,
                                   const std::string& field) const {
  StateElementKey key;
  key.kind = ElementKind::IFR;
  key.local = base;
  key.field = field;
  key.base_type = types_.local_type(m, base);
  key.declaring = "?";
  key.field_type = "?";
  std::optional<Program::FieldRef> ref;
  if (key.base_type) ref = program_.find_field(*key.base_type, field, false);
  if (!ref)
    for (const auto& c : program_.classes())
      if (const auto* f = c.own_field(field); f && !f->is_static) {
        ref = Program::FieldRef{&c, f};
        break;
      }
  if (ref) {
    key.declaring = ref->declaring->name;
    key.field_type = ref->field->type;
  }
  return key;
}

StateElementKey ElementKeys::array(const MethodId& m, const std::string& base, const Operand& index) const {
  StateElementKey key;
  key.kind = ElementKind::AR;
  key.local = base;
  key.index = index;
  key.base_type = types_.local_type(m, base);
  return key;
}

StateElementKey ElementKeys::static_field(const std::string& cls, const std::string& field) const {
  StateElementKey key;
  key.kind = ElementKind::SFR;
  key.field = field;
  key.declaring = cls;
  key.field_type = "?";
  if (auto ref = program_.find_field(cls, field, true)) {
    key.declaring = ref->declaring->name;
    key.field_type = ref->field->type;
  }
  return key;
}

bool deterministic_clock() { return std::getenv("OA_SEED") != nullptr; }

AnalysisContext::AnalysisContext(const Program& p, Mode mode) : program_(p), mode_(mode), cha_(p) {
  if (mode != Mode::NoPA) pts_ = solve(p, pa_entry_points(p));
}

// ---------------------------------------------------------------------------
// Comparison rules

namespace {

void require(const WriteEvent& a, const WriteEvent& b, ElementKind k, const char* what) {
  if (a.element.kind != k || b.element.kind != k)
    throw Error(std::string(what) + ": element kind mismatch");
}

bool is_array_type(const std::string& t) { return t.size() > 2 && t.ends_with("[]"); }

// Equal, or related by the hierarchy. Unknown types are assumed related.
bool types_related(const Program& p, const std::optional<std::string>& a,
                   const std::optional<std::string>& b) {
  if (!a || !b) return true;
  if (*a == *b) return true;
  bool arr_a = is_array_type(*a), arr_b = is_array_type(*b);
  if (arr_a != arr_b) return false;
  if (arr_a)
    return types_related(p, a->substr(0, a->size() - 2), b->substr(0, b->size() - 2));
  if (!p.is_type(*a) || !p.is_type(*b)) return false;
  return p.related(*a, *b);
}

bool same_constructor(const WriteEvent& a, const WriteEvent& b) {
  return a.enclosing_kind == MethodKind::Constructor && b.enclosing_kind == MethodKind::Constructor &&
         a.method == b.method;
}

bool index_match(const WriteEvent& a, const WriteEvent& b) {
  const Operand& x = a.element.index;
  const Operand& y = b.element.index;
  if (x.is_local() && y.is_local()) return x.text == y.text && a.method == b.method;
  if (!x.is_local() && !y.is_local()) return x.text == y.text;
  return true;  // constant against local: unknown
}

const SiteSet& base_pts(const WriteEvent& e, const AnalysisContext& ctx) {
  const PointsToResult* r = ctx.pts();
  if (!r) throw Error("points-to comparison requested without a points-to result");
  return r->of(PointerVar::local(e.method, e.element.local));
}

bool intersects(const SiteSet& a, const SiteSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i;
    else ++j;
  }
  return false;
}

// Shared by IFR and AR: `selector` is the field / index agreement.
Comparison compare_heap(const WriteEvent& a, const WriteEvent& b, Mode mode,
                        const AnalysisContext& ctx, MissSink* sink, bool selector) {
  const bool ctor = same_constructor(a, b);
  auto name_type = [&] {
    return types_related(ctx.program(), a.element.base_type, b.element.base_type) && selector && !ctor
               ? Match::Match
               : Match::NoMatch;
  };
  if (mode == Mode::NoPA) return {name_type(), false};
  const SiteSet& pa = base_pts(a, ctx);
  const SiteSet& pb = base_pts(b, ctx);
  if (pa.empty() || pb.empty()) {
    if (sink) {
      for (const WriteEvent* e : {&a, &b})
        if (base_pts(*e, ctx).empty())
          sink->push_back({e->position, e->element.str(), MissRef::Reason::EmptyPts, false});
    }
    return {name_type(), true};
  }
  return {intersects(pa, pb) && selector && !ctor ? Match::Match : Match::NoMatch, false};
}

}  // namespace

Match compare_local(const WriteEvent& a, const WriteEvent& b) {
  require(a, b, ElementKind::LV, "compare_local");
  return a.method == b.method && a.element.local == b.element.local ? Match::Match : Match::NoMatch;
}

Comparison compare_instance_field(const WriteEvent& a, const WriteEvent& b, Mode mode,
                                  const AnalysisContext& ctx, MissSink* sink) {
  require(a, b, ElementKind::IFR, "compare_instance_field");
  return compare_heap(a, b, mode, ctx, sink, a.element.field == b.element.field);
}

Comparison compare_array(const WriteEvent& a, const WriteEvent& b, Mode mode,
                         const AnalysisContext& ctx, MissSink* sink) {
  require(a, b, ElementKind::AR, "compare_array");
  return compare_heap(a, b, mode, ctx, sink, index_match(a, b));
}

Match compare_static_field(const WriteEvent& a, const WriteEvent& b) {
  require(a, b, ElementKind::SFR, "compare_static_field");
  return a.element.declaring == b.element.declaring && a.element.field == b.element.field &&
                 a.element.field_type == b.element.field_type
             ? Match::Match
             : Match::NoMatch;
}

Match same_element(const WriteEvent& a, const WriteEvent& b, Mode mode, const AnalysisContext& ctx,
                   MissSink* sink) {
  if (a.element.kind != b.element.kind) return Match::NoMatch;
  switch (a.element.kind) {
    case ElementKind::LV: return compare_local(a, b);
    case ElementKind::SFR: return compare_static_field(a, b);
    case ElementKind::IFR: return compare_instance_field(a, b, mode, ctx, sink).result;
    case ElementKind::AR: return compare_array(a, b, mode, ctx, sink).result;
  }
  return Match::NoMatch;
}

CallResolution resolve_call(const Stmt& site, const MethodId& enclosing, Mode mode,
                            const AnalysisContext& ctx, MissSink* sink) {
  CallResolution out;
  const auto* vc = site.as<VirtualCall>();
  if (!vc || mode == Mode::NoPA) {
    auto t = ctx.cha().resolve(site, enclosing);
    out.targets.assign(t.begin(), t.end());
    return out;
  }
  const PointsToResult* r = ctx.pts();
  if (!r) throw Error("points-to call resolution requested without a points-to result");
  out.targets = r->callgraph.targets_at(site.pos);
  if (!out.targets.empty()) return out;
  out.missed = true;
  if (sink)
    sink->push_back({site.pos, vc->receiver + "." + vc->method + "()", MissRef::Reason::UnresolvedCall, false});
  if (mode == Mode::Hybrid) {
    auto t = ctx.cha().resolve(site, enclosing);
    out.targets.assign(t.begin(), t.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path enumeration

namespace {

using Clock = std::chrono::steady_clock;

struct BlockFrame {
  const Block* block;
  std::size_t index;
  bool method_body;
};

struct CallFrame {
  MethodId method;
  MethodKind kind;
  Provenance inherited;
  std::optional<WriteEvent> on_return;  // caller-side write of the call's result
};

struct Continuation {
  std::vector<BlockFrame> blocks;
  std::vector<CallFrame> calls;
  std::vector<SourcePos> call_path;
  std::vector<MethodId> frames;
};

class Walker {
public:
  using EventHook = std::function<void(const std::vector<WriteEvent>&)>;

  Walker(const AnalysisContext& ctx, const AnalysisBudget& budget, Clock::time_point start)
      : ctx_(ctx), keys_(ctx.program(), ctx.cha().types()), budget_(budget), start_(start) {}

  EventHook on_event;     // after every appended event
  EventHook on_path_end;  // once per complete path
  MissSink misses;

  void run(const MethodDef& entry) {
    Continuation k;
    k.blocks.push_back({&entry.body, 0, true});
    k.calls.push_back({entry.id(), entry.kind, Provenance::Base, std::nullopt});
    k.frames.push_back(entry.id());
    walk(std::move(k));
  }

  void stop() { stopped_ = true; }
  bool exhausted() const { return exhausted_; }
  const AnalysisStats& stats() const { return stats_; }

private:
  const AnalysisContext& ctx_;
  ElementKeys keys_;
  AnalysisBudget budget_;
  Clock::time_point start_;
  AnalysisStats stats_;
  bool stopped_ = false;
  bool exhausted_ = false;
  std::vector<WriteEvent> events_;

  void exhaust() {
    exhausted_ = true;
    stopped_ = true;
  }

  bool tick() {
    if (stopped_) return false;
    if (++stats_.visited > budget_.fuel) {
      exhaust();
      return false;
    }
    if (budget_.use_wall_clock && (stats_.visited & 1023) == 0) {
      std::chrono::duration<double> d = Clock::now() - start_;
      if (d.count() > budget_.wall_clock_seconds) {
        exhaust();
        return false;
      }
    }
    return true;
  }

  // Before starting an alternative continuation at a fork.
  bool may_branch() {
    if (stopped_) return false;
    if (stats_.paths >= budget_.path_cap) {
      exhaust();
      return false;
    }
    return true;
  }

  void push(WriteEvent e) {
    events_.push_back(std::move(e));
    if (on_event) on_event(events_);
  }

  Provenance effective(const Stmt& s, const Continuation& k) const {
    return s.provenance != Provenance::Base ? s.provenance : k.calls.back().inherited;
  }

  WriteEvent make_event(StateElementKey key, const Stmt& s, const Continuation& k) const {
    const CallFrame& f = k.calls.back();
    return {std::move(key), s.pos, effective(s, k), f.method, f.kind, k.call_path, k.frames};
  }

  void finish_path() {
    ++stats_.paths;
    if (on_path_end) on_path_end(events_);
  }

  // Leaves the innermost method: pops its frames and emits the pending result write.
  void leave_method(Continuation& k) {
    while (!k.blocks.empty()) {
      bool body = k.blocks.back().method_body;
      k.blocks.pop_back();
      if (body) break;
    }
    std::optional<WriteEvent> pending = std::move(k.calls.back().on_return);
    k.calls.pop_back();
    k.frames.pop_back();
    if (!k.call_path.empty()) k.call_path.pop_back();
    if (pending) push(std::move(*pending));
  }

  template <class Apply>
  void fork(Continuation& k, std::size_t n, Apply apply) {
    const std::size_t mark = events_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && !may_branch()) return;
      if (stopped_) return;
      Continuation next = i + 1 == n ? std::move(k) : k;
      apply(i, next);
      walk(std::move(next));
      events_.resize(mark);
    }
  }

  void call(Continuation& k, const Stmt& s, std::optional<std::string> result) {
    const CallFrame& here = k.calls.back();
    CallResolution res = resolve_call(s, here.method, ctx_.mode(), ctx_, &misses);
    std::optional<WriteEvent> pending;
    if (result) pending = make_event(keys_.local(*result), s, k);

    std::vector<const MethodDef*> descend;
    bool skip = res.targets.empty() || res.missed;
    const bool too_deep = static_cast<int>(k.calls.size()) > budget_.depth_limit;
    for (const auto& t : res.targets) {
      const MethodDef* m = ctx_.program().find_method(t);
      bool recursive = std::find(k.frames.begin(), k.frames.end(), t) != k.frames.end();
      if (!m || too_deep || recursive)
        skip = true;
      else
        descend.push_back(m);
    }
    const Provenance inherited = effective(s, k);
    fork(k, descend.size() + (skip ? 1 : 0), [&](std::size_t i, Continuation& next) {
      if (i == descend.size()) {
        if (pending) push(*pending);
        return;
      }
      const MethodDef* m = descend[i];
      next.calls.push_back({m->id(), m->kind, inherited, pending});
      next.call_path.push_back(s.pos);
      next.frames.push_back(m->id());
      next.blocks.push_back({&m->body, 0, true});
    });
  }

  void walk(Continuation k) {
    while (!stopped_) {
      if (k.blocks.empty()) {
        finish_path();
        return;
      }
      BlockFrame& top = k.blocks.back();
      if (top.index == top.block->size()) {
        if (top.method_body)
          leave_method(k);
        else
          k.blocks.pop_back();
        continue;
      }
      const Stmt& s = (*top.block)[top.index++];
      if (!tick()) return;
      const MethodId method = k.calls.back().method;

      if (const auto* n = s.as<If>()) {
        fork(k, 2, [&](std::size_t i, Continuation& next) {
          next.blocks.push_back({i == 0 ? &n->then_block : &n->else_block, 0, false});
        });
        return;
      }
      if (const auto* w = s.as<While>()) {
        fork(k, 2, [&](std::size_t i, Continuation& next) {
          if (i == 0) next.blocks.push_back({&w->body, 0, false});
        });
        return;
      }
      if (const auto* c = s.as<VirtualCall>()) {
        call(k, s, c->result);
        return;
      }
      if (const auto* c = s.as<StaticCall>()) {
        call(k, s, c->result);
        return;
      }
      if (const auto* a = s.as<AllocAssign>()) {
        if (ctx_.program().find_ctor(a->cls, a->args.size())) {
          call(k, s, a->target);
          return;
        }
        push(make_event(keys_.local(a->target), s, k));
        continue;
      }
      if (s.as<Return>()) {
        leave_method(k);
        continue;
      }
      if (const auto* f = s.as<FieldStore>()) {
        push(make_event(keys_.field(method, f->base, f->field), s, k));
      } else if (const auto* st = s.as<StaticStore>()) {
        push(make_event(keys_.static_field(st->cls, st->field), s, k));
      } else if (const auto* ar = s.as<ArrayStore>()) {
        push(make_event(keys_.array(method, ar->base, ar->index), s, k));
      } else if (auto d = s.defined_local()) {
        push(make_event(keys_.local(*d), s, k));
      }
    }
  }
};

// Most recent prior write to the same element, judged for `events.back()`.
std::optional<ConflictReport> check_last(const std::vector<WriteEvent>& events, const MethodId& entry,
                                         const AnalysisContext& ctx, MissSink* sink) {
  const WriteEvent& w = events.back();
  if (w.provenance == Provenance::Base) return std::nullopt;
  for (std::size_t j = events.size() - 1; j-- > 0;) {
    const WriteEvent& prior = events[j];
    if (same_element(prior, w, ctx.mode(), ctx, sink) != Match::Match) continue;
    if (prior.provenance == opposite(w.provenance))
      return ConflictReport{w.element.str(), w, prior, entry};
    return std::nullopt;
  }
  return std::nullopt;
}

using ConflictKey = std::tuple<int, int, SourcePos, SourcePos, std::string>;

ConflictKey key_of(const ConflictReport& c) {
  return {c.overridden.top_line(), c.overriding.top_line(), c.overridden.position,
          c.overriding.position, c.element};
}

std::vector<MissRef> unique_sorted(MissSink s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double elapsed_ms(Clock::time_point start, const AnalysisStats& stats) {
  if (deterministic_clock()) return static_cast<double>(stats.visited + stats.solver_work) / 1000.0;
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AnalysisOutcome detect_from(const AnalysisContext& ctx, const MethodDef& entry,
                            const AnalysisBudget& budget, Clock::time_point start) {
  Walker walker(ctx, budget, start);
  std::map<ConflictKey, ConflictReport> found;
  walker.on_event = [&](const std::vector<WriteEvent>& events) {
    if (auto c = check_last(events, entry.id(), ctx, &walker.misses)) {
      found.try_emplace(key_of(*c), std::move(*c));
      if (budget.stop_at_first_conflict) walker.stop();
    }
  };
  walker.run(entry);

  AnalysisOutcome out;
  for (auto& [key, c] : found) out.conflicts.push_back(std::move(c));
  out.miss_refs = unique_sorted(std::move(walker.misses));
  out.stats = walker.stats();
  if (ctx.pts()) out.stats.solver_work = ctx.pts()->work;
  out.verdict = walker.exhausted() ? Verdict::Timeout
                : out.conflicts.empty() ? Verdict::False
                                        : Verdict::True;
  out.stats.elapsed_ms = elapsed_ms(start, out.stats);
  return out;
}

}  // namespace

EnumerationResult enumerate_write_paths(const AnalysisContext& ctx, const MethodDef& entry,
                                        const AnalysisBudget& budget,
                                        const std::function<void(const std::vector<WriteEvent>&)>& sink) {
  Walker walker(ctx, budget, Clock::now());
  walker.on_path_end = sink;
  walker.run(entry);
  return {walker.stats(), walker.exhausted()};
}

std::vector<ConflictReport> scan_path(const std::vector<WriteEvent>& path, const MethodId& entry,
                                      const AnalysisContext& ctx, MissSink* sink) {
  std::vector<ConflictReport> out;
  std::vector<WriteEvent> prefix;
  prefix.reserve(path.size());
  for (const auto& e : path) {
    prefix.push_back(e);
    if (auto c = check_last(prefix, entry, ctx, sink)) out.push_back(std::move(*c));
  }
  return out;
}

AnalysisOutcome detect(const AnalysisContext& ctx, const MethodDef& entry, const AnalysisBudget& budget) {
  return detect_from(ctx, entry, budget, Clock::now());
}

AnalysisOutcome detect(const Program& p, const MethodDef& entry, Mode mode, const AnalysisBudget& budget) {
  auto start = Clock::now();
  AnalysisContext ctx(p, mode);
  return detect_from(ctx, entry, budget, start);
}

AnalysisOutcome detect(const Program& p, const std::string& entry, Mode mode, const AnalysisBudget& budget) {
  const MethodDef* m = nullptr;
  try {
    m = &find_entry(p, entry);
  } catch (const Error&) {
    throw Error("entry not found: " + entry);
  }
  return detect(p, *m, mode, budget);
}

}  // namespace semconf
