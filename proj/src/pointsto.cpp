#include "semconf/pointsto.hpp"

#include <sstream>

namespace semconf {

std::vector<AllocSite> collect_alloc_sites(const Program& p) {
  std::vector<AllocSite> out;
  for (const auto* m : p.all_methods()) {
    for_each_stmt(m->body, [&](const Stmt& s) {
      if (const auto* a = s.as<AllocAssign>())
        out.push_back({out.size(), s.pos, a->cls, AllocSite::Kind::Object, m->id()});
      else if (const auto* a = s.as<ArrayAlloc>())
        out.push_back({out.size(), s.pos, a->elem_type, AllocSite::Kind::Array, m->id()});
    });
  }
  return out;
}

std::string PointerVar::str() const {
  switch (kind) {
    case Kind::Local: return method.str() + ":" + name;
    case Kind::Field: return "site" + std::to_string(site) + "." + name;
    case Kind::ArraySlot: return "site" + std::to_string(site) + "[]";
    case Kind::Static: return cls + "::" + name;
    case Kind::Return: return method.str() + ":<ret>";
  }
  return {};
}

const SiteSet& PointsToResult::of(const PointerVar& v) const {
  static const SiteSet kEmpty;
  auto it = pts.find(v);
  return it == pts.end() ? kEmpty : it->second;
}

std::string PointsToResult::dump() const {
  std::ostringstream out;
  for (const auto& [var, set] : pts) {
    if (set.empty()) continue;
    out << var.str() << "\t{";
    bool first = true;
    for (auto s : set) {
      out << (first ? "" : ",") << s;
      first = false;
    }
    out << "}\n";
  }
  out << "#MISS\n";
  for (const auto& u : callgraph.unresolved) out << u.str() << '\n';
  return out.str();
}

std::set<MethodId> pa_entry_points(const Program& p) {
  auto methods = p.all_methods();
  if (methods.empty()) throw Error("no entry points: program has no methods");
  std::set<MethodId> mains;
  for (const auto* m : methods)
    if (m->is_static && m->name == "main") mains.insert(m->id());
  if (!mains.empty()) return mains;
  std::set<MethodId> out;
  for (const auto* m : methods)
    if (m->is_public || m->kind == MethodKind::Constructor) out.insert(m->id());
  return out;
}

namespace {

class Solver {
public:
  Solver(const Program& p, PointsToResult& r) : p_(p), r_(r) {}

  bool round() {
    changed_ = false;
    // Snapshot: methods discovered during this round are processed next round.
    std::vector<MethodId> reachable(r_.callgraph.nodes.begin(), r_.callgraph.nodes.end());
    for (const auto& id : reachable) {
      const MethodDef* m = p_.find_method(id);
      if (!m) continue;
      for_each_stmt(m->body, [&](const Stmt& s) { apply(*m, s); });
    }
    return changed_;
  }

private:
  const Program& p_;
  PointsToResult& r_;
  bool changed_ = false;
  std::map<SourcePos, std::size_t> site_at_;

  SiteSet& at(const PointerVar& v) { return r_.pts[v]; }

  void include(const PointerVar& dst, const SiteSet& src) {
    ++r_.work;
    if (src.empty()) return;
    auto& d = at(dst);
    for (auto s : src)
      if (d.insert(s).second) changed_ = true;
  }
  void include_site(const PointerVar& dst, std::size_t site) {
    ++r_.work;
    if (at(dst).insert(site).second) changed_ = true;
  }
  // Copies so that `include` may grow the same map without invalidation worries.
  SiteSet get(const PointerVar& v) const { return r_.of(v); }

  std::size_t site_of(const SourcePos& pos) {
    if (site_at_.empty())
      for (const auto& s : r_.sites) site_at_.emplace(s.pos, s.id);
    return site_at_.at(pos);
  }

  void edge(const SourcePos& site, const MethodId& caller, const MethodDef& target) {
    bool known = r_.callgraph.nodes.contains(target.id());
    if (!r_.callgraph.has_edge(site, target.id())) changed_ = true;
    r_.callgraph.add_edge(site, caller, target.id());
    if (!known) changed_ = true;
  }

  void bind_call(const MethodDef& caller, const MethodDef& target, const std::vector<Operand>& args,
                 const std::optional<std::string>& result) {
    for (std::size_t i = 0; i < args.size() && i < target.params.size(); ++i)
      if (args[i].is_local())
        include(PointerVar::local(target.id(), target.params[i]),
                get(PointerVar::local(caller.id(), args[i].text)));
    if (result)
      include(PointerVar::local(caller.id(), *result), get(PointerVar::returned(target.id())));
  }

  std::string static_owner(const std::string& cls, const std::string& field) const {
    auto f = p_.find_field(cls, field, true);
    return f ? f->declaring->name : cls;
  }

  void apply(const MethodDef& m, const Stmt& s) {
    const MethodId id = m.id();
    auto local = [&](const std::string& n) { return PointerVar::local(id, n); };
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, AllocAssign>) {
            auto site = site_of(s.pos);
            include_site(local(k.target), site);
            if (const auto* ctor = p_.find_ctor(k.cls, k.args.size())) {
              edge(s.pos, id, *ctor);
              include_site(PointerVar::local(ctor->id(), "this"), site);
              bind_call(m, *ctor, k.args, std::nullopt);
            }
          } else if constexpr (std::is_same_v<T, ArrayAlloc>) {
            include_site(local(k.target), site_of(s.pos));
          } else if constexpr (std::is_same_v<T, CopyAssign>) {
            if (k.source.is_local()) include(local(k.target), get(local(k.source.text)));
          } else if constexpr (std::is_same_v<T, FieldStore>) {
            if (k.source.is_local()) {
              auto src = get(local(k.source.text));
              for (auto o : get(local(k.base))) include(PointerVar::field(o, k.field), src);
            }
          } else if constexpr (std::is_same_v<T, FieldLoad>) {
            for (auto o : get(local(k.base)))
              include(local(k.target), get(PointerVar::field(o, k.field)));
          } else if constexpr (std::is_same_v<T, StaticStore>) {
            if (k.source.is_local())
              include(PointerVar::static_field(static_owner(k.cls, k.field), k.field),
                      get(local(k.source.text)));
          } else if constexpr (std::is_same_v<T, StaticLoad>) {
            include(local(k.target),
                    get(PointerVar::static_field(static_owner(k.cls, k.field), k.field)));
          } else if constexpr (std::is_same_v<T, ArrayStore>) {
            if (k.source.is_local()) {
              auto src = get(local(k.source.text));
              for (auto o : get(local(k.base))) include(PointerVar::array_slot(o), src);
            }
          } else if constexpr (std::is_same_v<T, ArrayLoad>) {
            for (auto o : get(local(k.base)))
              include(local(k.target), get(PointerVar::array_slot(o)));
          } else if constexpr (std::is_same_v<T, VirtualCall>) {
            for (auto o : get(local(k.receiver))) {
              const auto& site = r_.sites[o];
              if (site.kind != AllocSite::Kind::Object) continue;
              const auto* target = p_.dispatch(site.cls, k.method, k.args.size());
              if (!target) continue;
              edge(s.pos, id, *target);
              include_site(PointerVar::local(target->id(), "this"), o);
              bind_call(m, *target, k.args, k.result);
            }
          } else if constexpr (std::is_same_v<T, StaticCall>) {
            if (const auto* target = p_.find_static_method(k.cls, k.method, k.args.size())) {
              edge(s.pos, id, *target);
              bind_call(m, *target, k.args, k.result);
            }
          } else if constexpr (std::is_same_v<T, Return>) {
            if (k.value) include(PointerVar::returned(id), get(local(*k.value)));
          }
        },
        s.kind);
  }
};

}  // namespace

bool propagate_round(const Program& p, PointsToResult& r) {
  ++r.rounds;
  return Solver(p, r).round();
}

PointsToResult solve(const Program& p, const std::set<MethodId>& entries) {
  PointsToResult r;
  r.sites = collect_alloc_sites(p);
  r.entry_points = entries;
  r.callgraph.builder = GraphBuilder::PTS;
  for (const auto& e : entries) {
    if (!p.find_method(e)) throw Error("entry point " + e.str() + " is not in the program");
    r.callgraph.roots.insert(e);
    r.callgraph.nodes.insert(e);
  }
  Solver solver(p, r);
  do ++r.rounds;
  while (solver.round());

  for (const auto& id : r.callgraph.nodes) {
    const MethodDef& m = p.method(id);
    for_each_stmt(m.body, [&](const Stmt& s) {
      if (s.as<VirtualCall>() && r.callgraph.targets_at(s.pos).empty())
        r.callgraph.unresolved.insert(s.pos);
    });
  }
  return r;
}

std::set<std::string> locals_of(const MethodDef& m) {
  std::set<std::string> out(m.params.begin(), m.params.end());
  if (!m.is_static) out.insert("this");
  auto operand = [&](const Operand& o) {
    if (o.is_local()) out.insert(o.text);
  };
  for_each_stmt(m.body, [&](const Stmt& s) {
    if (auto d = s.defined_local()) out.insert(*d);
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, AllocAssign>) {
            for (const auto& a : k.args) operand(a);
          } else if constexpr (std::is_same_v<T, CopyAssign> || std::is_same_v<T, StaticStore>) {
            operand(k.source);
          } else if constexpr (std::is_same_v<T, FieldStore>) {
            out.insert(k.base);
            operand(k.source);
          } else if constexpr (std::is_same_v<T, FieldLoad>) {
            out.insert(k.base);
          } else if constexpr (std::is_same_v<T, ArrayStore>) {
            out.insert(k.base);
            operand(k.index);
            operand(k.source);
          } else if constexpr (std::is_same_v<T, ArrayLoad>) {
            out.insert(k.base);
            operand(k.index);
          } else if constexpr (std::is_same_v<T, VirtualCall>) {
            out.insert(k.receiver);
            for (const auto& a : k.args) operand(a);
          } else if constexpr (std::is_same_v<T, StaticCall>) {
            for (const auto& a : k.args) operand(a);
          } else if constexpr (std::is_same_v<T, If> || std::is_same_v<T, While>) {
            out.insert(k.cond);
          } else if constexpr (std::is_same_v<T, Return>) {
            if (k.value) out.insert(*k.value);
          } else if constexpr (std::is_same_v<T, OpaqueOp>) {
            for (const auto& a : k.operands) operand(a);
          }
        },
        s.kind);
  });
  return out;
}

PtsLookup pts_of(const PointsToResult& r, const Program& p, const PointerExpr& e) {
  const MethodDef* m = p.find_method(e.method);
  if (!m) throw Error("pts_of: unknown method " + e.method.str());
  if (!locals_of(*m).contains(e.base))
    throw Error("pts_of: '" + e.base + "' does not occur in " + e.method.str());
  SiteSet base = r.of(PointerVar::local(e.method, e.base));
  PtsLookup out;
  if (e.field) {
    for (auto o : base) {
      const auto& s = r.of(PointerVar::field(o, *e.field));
      out.sites.insert(s.begin(), s.end());
    }
  } else if (e.array_element) {
    for (auto o : base) {
      const auto& s = r.of(PointerVar::array_slot(o));
      out.sites.insert(s.begin(), s.end());
    }
  } else {
    out.sites = std::move(base);
  }
  out.miss = out.sites.empty();
  return out;
}

CallGraph build_pa_graph(const PointsToResult& r) { return r.callgraph; }

}  // namespace semconf
