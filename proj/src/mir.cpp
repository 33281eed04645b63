#include "semconf/mir.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace semconf {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Left: return "LEFT";
    case Provenance::Right: return "RIGHT";
    default: return "BASE";
  }
}

std::string Operand::str() const {
  if (kind == Kind::Str) return "\"" + text + "\"";
  return text;
}

bool If::operator==(const If& o) const {
  return cond == o.cond && then_block == o.then_block && else_block == o.else_block;
}

bool While::operator==(const While& o) const { return cond == o.cond && body == o.body; }

std::optional<std::string> Stmt::defined_local() const {
  return std::visit(
      [](const auto& k) -> std::optional<std::string> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AllocAssign> || std::is_same_v<T, ReflectiveAssign> ||
                      std::is_same_v<T, CopyAssign> || std::is_same_v<T, FieldLoad> ||
                      std::is_same_v<T, StaticLoad> || std::is_same_v<T, ArrayAlloc> ||
                      std::is_same_v<T, ArrayLoad> || std::is_same_v<T, OpaqueOp>) {
          return k.target;
        } else if constexpr (std::is_same_v<T, VirtualCall> || std::is_same_v<T, StaticCall>) {
          return k.result;
        } else {
          return std::nullopt;
        }
      },
      kind);
}

const FieldDef* ClassDef::own_field(std::string_view field) const {
  for (const auto& f : fields)
    if (f.name == field) return &f;
  return nullptr;
}

Program::Program(ProgramData data) : data_(std::move(data)) { build_index(); }

void Program::build_index() {
  class_index_.clear();
  iface_index_.clear();
  method_index_.clear();
  for (std::size_t i = 0; i < data_.classes.size(); ++i) {
    const auto& c = data_.classes[i];
    class_index_.emplace(c.name, i);
    for (const auto& m : c.methods) method_index_.emplace(m.id(), &m);
    for (const auto& m : c.constructors) method_index_.emplace(m.id(), &m);
  }
  for (std::size_t i = 0; i < data_.interfaces.size(); ++i)
    iface_index_.emplace(data_.interfaces[i].name, i);
  super_cache_.clear();
  for (const auto& c : data_.classes) super_cache_.emplace(c.name, compute_supertypes(c.name));
  for (const auto& i : data_.interfaces) super_cache_.emplace(i.name, compute_supertypes(i.name));
}

const ClassDef* Program::find_class(std::string_view name) const {
  auto it = class_index_.find(name);
  return it == class_index_.end() ? nullptr : &data_.classes[it->second];
}

const InterfaceDef* Program::find_interface(std::string_view name) const {
  auto it = iface_index_.find(name);
  return it == iface_index_.end() ? nullptr : &data_.interfaces[it->second];
}

const MethodDef* Program::find_method(const MethodId& id) const {
  auto it = method_index_.find(id);
  return it == method_index_.end() ? nullptr : it->second;
}

const MethodDef& Program::method(const MethodId& id) const {
  if (const auto* m = find_method(id)) return *m;
  throw Error("unknown method " + id.str() + "/" + std::to_string(id.arity));
}

std::vector<const MethodDef*> Program::all_methods() const {
  std::vector<const MethodDef*> out;
  for (const auto& c : data_.classes) {
    for (const auto& m : c.constructors) out.push_back(&m);
    for (const auto& m : c.methods) out.push_back(&m);
  }
  return out;
}

std::vector<std::string> Program::direct_supertypes(std::string_view name) const {
  std::vector<std::string> out;
  if (const auto* c = find_class(name)) {
    if (c->superclass) out.push_back(*c->superclass);
    out.insert(out.end(), c->interfaces.begin(), c->interfaces.end());
  } else if (const auto* i = find_interface(name)) {
    if (i->extends) out.push_back(*i->extends);
  }
  return out;
}

std::set<std::string> Program::supertypes(std::string_view name) const {
  if (auto it = super_cache_.find(name); it != super_cache_.end()) return it->second;
  return compute_supertypes(name);
}

std::set<std::string> Program::compute_supertypes(std::string_view name) const {
  std::set<std::string> seen{std::string(name)};
  std::deque<std::string> work{std::string(name)};
  while (!work.empty()) {
    auto cur = std::move(work.front());
    work.pop_front();
    for (auto& s : direct_supertypes(cur))
      if (seen.insert(s).second) work.push_back(std::move(s));
  }
  return seen;
}

bool Program::related(std::string_view a, std::string_view b) const {
  if (a == b) return true;
  auto sa = super_cache_.find(a);
  auto sb = super_cache_.find(b);
  if (sa != super_cache_.end() && sa->second.contains(std::string(b))) return true;
  if (sb != super_cache_.end() && sb->second.contains(std::string(a))) return true;
  return false;
}

const MethodDef* Program::dispatch(std::string_view cls, std::string_view name,
                                   std::size_t arity) const {
  std::set<std::string, std::less<>> seen;
  const ClassDef* c = find_class(cls);
  while (c && seen.insert(c->name).second) {
    for (const auto& m : c->methods)
      if (!m.is_static && m.name == name && m.params.size() == arity) return &m;
    c = c->superclass ? find_class(*c->superclass) : nullptr;
  }
  return nullptr;
}

const MethodDef* Program::find_static_method(std::string_view cls, std::string_view name,
                                             std::size_t arity) const {
  std::set<std::string, std::less<>> seen;
  const ClassDef* c = find_class(cls);
  while (c && seen.insert(c->name).second) {
    for (const auto& m : c->methods)
      if (m.is_static && m.name == name && m.params.size() == arity) return &m;
    c = c->superclass ? find_class(*c->superclass) : nullptr;
  }
  return nullptr;
}

const MethodDef* Program::find_ctor(std::string_view cls, std::size_t arity) const {
  if (const auto* c = find_class(cls))
    for (const auto& m : c->constructors)
      if (m.params.size() == arity) return &m;
  return nullptr;
}

std::optional<Program::FieldRef> Program::find_field(std::string_view cls, std::string_view field,
                                                     bool want_static) const {
  std::set<std::string, std::less<>> seen;
  const ClassDef* c = find_class(cls);
  while (c && seen.insert(c->name).second) {
    if (const auto* f = c->own_field(field); f && f->is_static == want_static)
      return FieldRef{c, f};
    c = c->superclass ? find_class(*c->superclass) : nullptr;
  }
  return std::nullopt;
}

std::set<std::string> Program::classes_responding_to(std::string_view name,
                                                     std::size_t arity) const {
  std::set<std::string> out;
  for (const auto& c : data_.classes)
    if (dispatch(c.name, name, arity)) out.insert(c.name);
  return out;
}

namespace {

void require_type(std::string_view name, const Program& p) {
  if (!p.is_type(name)) throw Error("unknown type '" + std::string(name) + "'");
}

void check_block_positions(const Block& block, std::map<SourcePos, int>& seen,
                           std::vector<Diagnostic>& out) {
  for_each_stmt(block, [&](const Stmt& s) {
    if (++seen[s.pos] == 2)
      out.push_back({s.pos, "duplicate statement position " + s.pos.str()});
  });
}

}  // namespace

std::vector<Diagnostic> validate_program(const Program& p) {
  std::vector<Diagnostic> out;

  std::map<std::string, int> names;
  for (const auto& c : p.classes())
    if (++names[c.name] == 2) out.push_back({c.pos, "duplicate type name '" + c.name + "'"});
  for (const auto& i : p.interfaces())
    if (++names[i.name] == 2) out.push_back({i.pos, "duplicate type name '" + i.name + "'"});

  for (const auto& c : p.classes()) {
    if (c.superclass) {
      if (!p.is_type(*c.superclass))
        out.push_back({c.pos, "unknown supertype '" + *c.superclass + "' of " + c.name});
      else if (!p.find_class(*c.superclass))
        out.push_back({c.pos, "class " + c.name + " extends interface '" + *c.superclass + "'"});
    }
    for (const auto& i : c.interfaces) {
      if (!p.is_type(i))
        out.push_back({c.pos, "unknown supertype '" + i + "' of " + c.name});
      else if (!p.find_interface(i))
        out.push_back({c.pos, "class " + c.name + " implements class '" + i + "'"});
    }
  }
  for (const auto& i : p.interfaces()) {
    if (i.extends && !p.is_type(*i.extends))
      out.push_back({i.pos, "unknown supertype '" + *i.extends + "' of " + i.name});
    else if (i.extends && !p.find_interface(*i.extends))
      out.push_back({i.pos, "interface " + i.name + " extends class '" + *i.extends + "'"});
  }

  // Cycle detection over the declared-type graph (colour DFS), one report per cycle entry.
  {
    std::map<std::string, int> colour;
    std::function<bool(const std::string&)> visit = [&](const std::string& n) -> bool {
      colour[n] = 1;
      for (const auto& s : p.direct_supertypes(n)) {
        if (!p.is_type(s)) continue;
        if (colour[s] == 1) return true;
        if (colour[s] == 0 && visit(s)) return true;
      }
      colour[n] = 2;
      return false;
    };
    auto check = [&](const std::string& name, const SourcePos& pos) {
      if (colour[name] != 0) return;
      if (visit(name)) out.push_back({pos, "inheritance cycle through '" + name + "'"});
    };
    for (const auto& c : p.classes()) check(c.name, c.pos);
    for (const auto& i : p.interfaces()) check(i.name, i.pos);
  }

  std::map<SourcePos, int> positions;
  for (const auto& c : p.classes()) {
    std::set<std::string> fields;
    for (const auto& f : c.fields)
      if (!fields.insert(f.name).second)
        out.push_back({c.pos, "duplicate field '" + f.name + "' in " + c.name});

    std::set<std::pair<std::string, std::size_t>> sigs;
    auto check_method = [&](const MethodDef& m) {
      if (!sigs.insert({m.name, m.params.size()}).second)
        out.push_back({m.pos, "duplicate method '" + m.name + "/" +
                                  std::to_string(m.params.size()) + "' in " + c.name});
      if (m.declaring_class != c.name)
        out.push_back({m.pos, "method " + m.name + " has wrong declaring class"});
      std::set<std::string> ps;
      for (const auto& pn : m.params) {
        if (!ps.insert(pn).second)
          out.push_back({m.pos, "duplicate parameter '" + pn + "' in " + c.name + "." + m.name});
        if (pn == "this") out.push_back({m.pos, "parameter may not be named 'this'"});
      }
      check_block_positions(m.body, positions, out);
    };
    for (const auto& m : c.methods) check_method(m);
    for (const auto& m : c.constructors) check_method(m);
  }
  return out;
}

bool subtype_of(std::string_view sub, std::string_view sup, const Program& p) {
  require_type(sub, p);
  require_type(sup, p);
  return p.supertypes(sub).contains(std::string(sup));
}

std::set<std::string> implementers_of(std::string_view t, const Program& p) {
  require_type(t, p);
  std::set<std::string> out;
  for (const auto& c : p.classes())
    if (p.supertypes(c.name).contains(std::string(t))) out.insert(c.name);
  return out;
}

Program map_provenance(const Program& p, const std::function<Provenance(Provenance)>& f) {
  ProgramData data = p.data();
  for_each_body_mut(data, [&](MethodDef& m) {
    for_each_stmt_mut(m.body, [&](Stmt& s) { s.provenance = f(s.provenance); });
  });
  return Program(std::move(data));
}

}  // namespace semconf
