#include "semconf/callgraph.hpp"

#include <deque>
#include <sstream>

namespace semconf {

namespace {

constexpr const char* kTop = "*";

bool is_array(const std::string& t) { return t.size() > 2 && t.ends_with("[]"); }
std::string element_of(const std::string& t) { return t.substr(0, t.size() - 2); }

// Virtual dispatch targets of `name/arity` for receivers of static type
// `recv` ("" or "*" meaning unknown).
std::set<MethodId> virtual_targets(const Program& p, const std::string& recv,
                                   const std::string& name, std::size_t arity) {
  std::set<MethodId> out;
  bool known = !recv.empty() && recv != kTop && p.is_type(recv);
  for (const auto& c : p.classes()) {
    if (known && !p.supertypes(c.name).contains(recv)) continue;
    if (const auto* m = p.dispatch(c.name, name, arity)) out.insert(m->id());
  }
  return out;
}

}  // namespace

StaticTypes::StaticTypes(const Program& p) : program_(p) {
  for (const auto* m : p.all_methods()) {
    params_[m->id()].assign(m->params.size(), "");
    returns_[m->id()] = "";
    locals_[m->id()];
  }
  // Every value only moves up a finite lattice, so this terminates; the cap
  // guards against pathological inputs.
  bool changed = true;
  while (changed && rounds_ < 200) {
    changed = false;
    ++rounds_;
    for (const auto* m : p.all_methods()) changed |= infer_method(*m);
  }
}

std::optional<std::string> StaticTypes::join(const Program& p, const std::string& a,
                                             const std::string& b) {
  if (a == b) return a;
  if (is_array(a) && is_array(b)) {
    auto e = join(p, element_of(a), element_of(b));
    if (!e) return std::nullopt;
    return *e + "[]";
  }
  if (!p.is_type(a) || !p.is_type(b)) return std::nullopt;
  auto sa = p.supertypes(a);
  auto sb = p.supertypes(b);
  std::set<std::string> common;
  for (const auto& s : sa)
    if (sb.contains(s)) common.insert(s);
  std::vector<std::string> minimal;
  for (const auto& c : common) {
    bool has_lower = false;
    for (const auto& d : common)
      if (d != c && p.supertypes(d).contains(c)) has_lower = true;
    if (!has_lower) minimal.push_back(c);
  }
  if (minimal.size() != 1) return std::nullopt;
  return minimal.front();
}

StaticTypes::Lattice StaticTypes::join_lattice(const Lattice& a, const Lattice& b) const {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a == kTop || b == kTop) return kTop;
  auto j = join(program_, a, b);
  return j ? *j : kTop;
}

StaticTypes::Lattice StaticTypes::field_type(const Lattice& base, const std::string& field) const {
  if (!base.empty() && base != kTop) {
    if (auto f = program_.find_field(base, field, false)) return f->field->type;
  }
  // Interface-typed or untyped bases: join over every related declaring class.
  Lattice out;
  for (const auto& c : program_.classes())
    if (const auto* f = c.own_field(field); f && !f->is_static) {
      if (!base.empty() && base != kTop && program_.is_type(base) &&
          !program_.supertypes(c.name).contains(base) && !program_.supertypes(base).contains(c.name))
        continue;
      out = join_lattice(out, f->type);
    }
  return out;
}

std::set<MethodId> StaticTypes::call_targets(const Stmt& s,
                                             const std::map<std::string, Lattice>& env) const {
  std::set<MethodId> out;
  if (const auto* vc = s.as<VirtualCall>()) {
    auto it = env.find(vc->receiver);
    Lattice recv = it == env.end() ? Lattice{} : it->second;
    out = virtual_targets(program_, recv, vc->method, vc->args.size());
  } else if (const auto* sc = s.as<StaticCall>()) {
    if (const auto* m = program_.find_static_method(sc->cls, sc->method, sc->args.size()))
      out.insert(m->id());
  } else if (const auto* a = s.as<AllocAssign>()) {
    if (const auto* m = program_.find_ctor(a->cls, a->args.size())) out.insert(m->id());
  }
  return out;
}

bool StaticTypes::infer_method(const MethodDef& m) {
  const MethodId id = m.id();
  auto& env = locals_[id];
  bool any_change = false;

  auto assign = [&](const std::string& local, const Lattice& t) {
    auto& cur = env[local];
    auto next = join_lattice(cur, t);
    if (next != cur) {
      cur = next;
      any_change = true;
    }
  };
  auto operand_type = [&](const Operand& o) -> Lattice {
    if (o.kind == Operand::Kind::Int) return "int";
    if (o.kind == Operand::Kind::Str) return "String";
    auto it = env.find(o.text);
    return it == env.end() ? Lattice{} : it->second;
  };
  auto flow_args = [&](const std::set<MethodId>& targets, const std::vector<Operand>& args) {
    for (const auto& t : targets) {
      auto& ps = params_[t];
      for (std::size_t i = 0; i < args.size() && i < ps.size(); ++i) {
        auto next = join_lattice(ps[i], operand_type(args[i]));
        if (next != ps[i]) {
          ps[i] = next;
          any_change = true;
        }
      }
    }
  };
  auto returned = [&](const std::set<MethodId>& targets) {
    Lattice out;
    for (const auto& t : targets) out = join_lattice(out, returns_[t]);
    return out;
  };

  if (!m.is_static) assign("this", m.declaring_class);
  for (std::size_t i = 0; i < m.params.size(); ++i) assign(m.params[i], params_[id][i]);

  // Flow-insensitive within the method: iterate to a local fixpoint.
  bool changed_ever = any_change;
  do {
    any_change = false;
    for_each_stmt(m.body, [&](const Stmt& s) {
      std::visit(
          [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AllocAssign>) {
              flow_args(call_targets(s, env), k.args);
              assign(k.target, k.cls);
            } else if constexpr (std::is_same_v<T, ReflectiveAssign>) {
              assign(k.target, k.type);
            } else if constexpr (std::is_same_v<T, CopyAssign>) {
              assign(k.target, operand_type(k.source));
            } else if constexpr (std::is_same_v<T, FieldLoad>) {
              assign(k.target, field_type(operand_type(Operand::local(k.base)), k.field));
            } else if constexpr (std::is_same_v<T, StaticLoad>) {
              auto f = program_.find_field(k.cls, k.field, true);
              assign(k.target, f ? f->field->type : Lattice{kTop});
            } else if constexpr (std::is_same_v<T, ArrayAlloc>) {
              assign(k.target, k.elem_type + "[]");
            } else if constexpr (std::is_same_v<T, ArrayLoad>) {
              auto b = operand_type(Operand::local(k.base));
              assign(k.target, is_array(b) ? element_of(b) : b.empty() ? Lattice{} : kTop);
            } else if constexpr (std::is_same_v<T, VirtualCall> || std::is_same_v<T, StaticCall>) {
              auto targets = call_targets(s, env);
              flow_args(targets, k.args);
              if (k.result) assign(*k.result, returned(targets));
            } else if constexpr (std::is_same_v<T, Return>) {
              if (k.value) {
                auto next = join_lattice(returns_[id], operand_type(Operand::local(*k.value)));
                if (next != returns_[id]) {
                  returns_[id] = next;
                  any_change = true;
                }
              }
            } else if constexpr (std::is_same_v<T, OpaqueOp>) {
              assign(k.target, "int");
            }
          },
          s.kind);
    });
    changed_ever |= any_change;
  } while (any_change);
  return changed_ever;
}

std::optional<std::string> StaticTypes::local_type(const MethodId& m,
                                                   const std::string& local) const {
  auto mit = locals_.find(m);
  if (mit == locals_.end()) return std::nullopt;
  auto it = mit->second.find(local);
  if (it == mit->second.end() || it->second.empty() || it->second == kTop) return std::nullopt;
  return it->second;
}

std::optional<std::string> StaticTypes::return_type(const MethodId& m) const {
  auto it = returns_.find(m);
  if (it == returns_.end() || it->second.empty() || it->second == kTop) return std::nullopt;
  return it->second;
}

void CallGraph::add_edge(const SourcePos& site, const MethodId& caller, const MethodId& target) {
  nodes.insert(caller);
  nodes.insert(target);
  if (by_site_[site].insert(target).second) edges_.insert({site, caller, target});
}

std::vector<MethodId> CallGraph::targets_at(const SourcePos& site) const {
  auto it = by_site_.find(site);
  if (it == by_site_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

bool CallGraph::has_edge(const SourcePos& site, const MethodId& target) const {
  auto it = by_site_.find(site);
  return it != by_site_.end() && it->second.contains(target);
}

std::string CallGraph::dump() const {
  std::ostringstream out;
  for (const auto& e : edges_)
    out << e.caller.str() << '\t' << e.site.str() << '\t' << e.target.str() << '\n';
  return out.str();
}

std::set<MethodId> ChaResolver::resolve(const Stmt& site, const MethodId& enclosing) const {
  if (const auto* vc = site.as<VirtualCall>()) {
    auto recv = types_.local_type(enclosing, vc->receiver);
    auto out = virtual_targets(program_, recv.value_or(""), vc->method, vc->args.size());
    if (out.empty() && program_.classes_responding_to(vc->method, vc->args.size()).empty())
      throw Error("cannot resolve call to '" + vc->method + "' at " + site.pos.str());
    return out;
  }
  if (const auto* sc = site.as<StaticCall>()) {
    if (const auto* m = program_.find_static_method(sc->cls, sc->method, sc->args.size()))
      return {m->id()};
    throw Error("cannot resolve static call " + sc->cls + "::" + sc->method + " at " +
                site.pos.str());
  }
  if (const auto* a = site.as<AllocAssign>()) {
    if (const auto* m = program_.find_ctor(a->cls, a->args.size())) return {m->id()};
    return {};
  }
  return {};
}

std::set<MethodId> cha_resolve(const Stmt& site, const MethodId& enclosing, const Program& p) {
  return ChaResolver(p).resolve(site, enclosing);
}

CallGraph build_cha_graph(const ChaResolver& cha, const MethodDef& root) {
  const Program& p = cha.program();
  CallGraph g;
  g.builder = GraphBuilder::CHA;
  g.roots.insert(root.id());
  g.nodes.insert(root.id());
  std::deque<MethodId> work{root.id()};
  std::set<MethodId> seen{root.id()};
  while (!work.empty()) {
    MethodId cur = work.front();
    work.pop_front();
    const MethodDef& m = p.method(cur);
    for_each_stmt(m.body, [&](const Stmt& s) {
      for (const auto& t : cha.resolve(s, cur)) {
        g.add_edge(s.pos, cur, t);
        if (seen.insert(t).second) work.push_back(t);
      }
    });
  }
  return g;
}

CallGraph build_cha_graph(const Program& p, const MethodDef& root) {
  return build_cha_graph(ChaResolver(p), root);
}

}  // namespace semconf
