#pragma once

// The analyzed intermediate language: a small structured, class-based IR
// whose statements carry a source position and a change provenance tag.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semconf {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SourcePos {
  std::string file;
  int line = 0;

  auto operator<=>(const SourcePos&) const = default;
  std::string str() const { return file + ":" + std::to_string(line); }
};

// Which side of a merge a statement comes from.
enum class Provenance : std::uint8_t { Base, Left, Right };

std::string_view to_string(Provenance p);

inline Provenance opposite(Provenance p) {
  switch (p) {
    case Provenance::Left: return Provenance::Right;
    case Provenance::Right: return Provenance::Left;
    default: return Provenance::Base;
  }
}

// Atom appearing in argument lists, store sources and array indexes.
struct Operand {
  enum class Kind : std::uint8_t { Local, Int, Str };

  Kind kind = Kind::Local;
  std::string text;  // local name, decimal literal, or string contents
  std::int64_t value = 0;

  static Operand local(std::string name) { return {Kind::Local, std::move(name), 0}; }
  static Operand integer(std::int64_t v) { return {Kind::Int, std::to_string(v), v}; }
  static Operand string(std::string s) { return {Kind::Str, std::move(s), 0}; }

  bool is_local() const { return kind == Kind::Local; }
  std::string str() const;

  bool operator==(const Operand&) const = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct AllocAssign {
  std::string target, cls;
  std::vector<Operand> args;
  bool operator==(const AllocAssign&) const = default;
};
// `x = mkref T`: an instance of T whose allocation site is unknown.
struct ReflectiveAssign {
  std::string target, type;
  bool operator==(const ReflectiveAssign&) const = default;
};
struct CopyAssign {
  std::string target;
  Operand source;
  bool operator==(const CopyAssign&) const = default;
};
struct FieldStore {
  std::string base, field;
  Operand source;
  bool operator==(const FieldStore&) const = default;
};
struct FieldLoad {
  std::string target, base, field;
  bool operator==(const FieldLoad&) const = default;
};
struct StaticStore {
  std::string cls, field;
  Operand source;
  bool operator==(const StaticStore&) const = default;
};
struct StaticLoad {
  std::string target, cls, field;
  bool operator==(const StaticLoad&) const = default;
};
struct ArrayAlloc {
  std::string target, elem_type;
  std::int64_t size = 0;
  bool operator==(const ArrayAlloc&) const = default;
};
struct ArrayStore {
  std::string base;
  Operand index, source;
  bool operator==(const ArrayStore&) const = default;
};
struct ArrayLoad {
  std::string target, base;
  Operand index;
  bool operator==(const ArrayLoad&) const = default;
};
struct VirtualCall {
  std::string receiver, method;
  std::vector<Operand> args;
  std::optional<std::string> result;
  bool operator==(const VirtualCall&) const = default;
};
struct StaticCall {
  std::string cls, method;
  std::vector<Operand> args;
  std::optional<std::string> result;
  bool operator==(const StaticCall&) const = default;
};
struct If {
  std::string cond;
  Block then_block, else_block;
  bool operator==(const If&) const;
};
struct While {
  std::string cond;
  Block body;
  bool operator==(const While&) const;
};
struct Return {
  std::optional<std::string> value;
  bool operator==(const Return&) const = default;
};
// Arithmetic/logic of any kind; only the write to `target` matters.
struct OpaqueOp {
  std::string target;
  std::vector<Operand> operands;
  bool operator==(const OpaqueOp&) const = default;
};

struct Stmt {
  using Kind = std::variant<AllocAssign, ReflectiveAssign, CopyAssign, FieldStore, FieldLoad,
                            StaticStore, StaticLoad, ArrayAlloc, ArrayStore, ArrayLoad,
                            VirtualCall, StaticCall, If, While, Return, OpaqueOp>;

  SourcePos pos;
  Provenance provenance = Provenance::Base;
  Kind kind;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind);
  }
  template <class T>
  T* as() {
    return std::get_if<T>(&kind);
  }

  // Local written directly by this statement, if any.
  std::optional<std::string> defined_local() const;

  bool operator==(const Stmt&) const = default;
};

struct FieldDef {
  std::string name;
  std::string type;
  bool is_static = false;
  bool operator==(const FieldDef&) const = default;
};

enum class MethodKind : std::uint8_t { Method, Constructor };

inline constexpr std::string_view kCtorName = "<init>";

struct MethodId {
  std::string cls;
  std::string name;
  std::size_t arity = 0;

  auto operator<=>(const MethodId&) const = default;
  bool is_ctor() const { return name == kCtorName; }
  // `Class.method`, as used in reports and dumps.
  std::string str() const { return cls + "." + name; }
};

struct MethodDef {
  std::string name;
  std::vector<std::string> params;
  bool is_static = false;
  bool is_public = false;
  Block body;
  std::string declaring_class;
  MethodKind kind = MethodKind::Method;
  SourcePos pos;

  MethodId id() const { return {declaring_class, name, params.size()}; }
  bool operator==(const MethodDef&) const = default;
};

struct ClassDef {
  std::string name;
  std::optional<std::string> superclass;
  std::vector<std::string> interfaces;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;
  std::vector<MethodDef> constructors;
  SourcePos pos;

  const FieldDef* own_field(std::string_view field) const;
  bool operator==(const ClassDef&) const = default;
};

struct MethodSig {
  std::string name;
  std::size_t arity = 0;
  bool operator==(const MethodSig&) const = default;
};

struct InterfaceDef {
  std::string name;
  std::optional<std::string> extends;
  std::vector<MethodSig> methods;
  SourcePos pos;
  bool operator==(const InterfaceDef&) const = default;
};

struct ProgramData {
  std::vector<ClassDef> classes;
  std::vector<InterfaceDef> interfaces;
  bool operator==(const ProgramData&) const = default;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
};

// Immutable program with name indexes. To transform, copy data(), edit it,
// and construct a new Program.
class Program {
public:
  Program() = default;
  explicit Program(ProgramData data);

  // The method index holds pointers into data_, so copies re-index.
  Program(const Program& o) : data_(o.data_) { build_index(); }
  Program(Program&& o) noexcept : data_(std::move(o.data_)) { build_index(); }
  Program& operator=(const Program& o) {
    if (this != &o) {
      data_ = o.data_;
      build_index();
    }
    return *this;
  }
  Program& operator=(Program&& o) noexcept {
    data_ = std::move(o.data_);
    build_index();
    return *this;
  }

  const ProgramData& data() const { return data_; }
  const std::vector<ClassDef>& classes() const { return data_.classes; }
  const std::vector<InterfaceDef>& interfaces() const { return data_.interfaces; }

  const ClassDef* find_class(std::string_view name) const;
  const InterfaceDef* find_interface(std::string_view name) const;
  bool is_type(std::string_view name) const { return find_class(name) || find_interface(name); }

  const MethodDef* find_method(const MethodId& id) const;
  const MethodDef& method(const MethodId& id) const;  // throws if absent

  // Methods and constructors in declaration order.
  std::vector<const MethodDef*> all_methods() const;

  // Direct supertypes (superclass first, then interfaces / extended interface).
  std::vector<std::string> direct_supertypes(std::string_view name) const;
  // Reflexive-transitive supertypes; tolerant of cycles and unknown names.
  std::set<std::string> supertypes(std::string_view name) const;
  bool related(std::string_view a, std::string_view b) const;

  // Instance method lookup along the superclass chain.
  const MethodDef* dispatch(std::string_view cls, std::string_view name, std::size_t arity) const;
  const MethodDef* find_static_method(std::string_view cls, std::string_view name,
                                      std::size_t arity) const;
  const MethodDef* find_ctor(std::string_view cls, std::size_t arity) const;

  struct FieldRef {
    const ClassDef* declaring = nullptr;
    const FieldDef* field = nullptr;
  };
  // Field lookup along the superclass chain; `want_static` filters kind.
  std::optional<FieldRef> find_field(std::string_view cls, std::string_view field,
                                     bool want_static) const;

  // Every class whose own or inherited methods include `name/arity`.
  std::set<std::string> classes_responding_to(std::string_view name, std::size_t arity) const;

  bool operator==(const Program& o) const { return data_ == o.data_; }

private:
  ProgramData data_;
  std::map<std::string, std::size_t, std::less<>> class_index_;
  std::map<std::string, std::size_t, std::less<>> iface_index_;
  std::map<MethodId, const MethodDef*> method_index_;
  std::map<std::string, std::set<std::string>, std::less<>> super_cache_;

  void build_index();
  std::set<std::string> compute_supertypes(std::string_view name) const;

};

std::vector<Diagnostic> validate_program(const Program& p);

// True iff sub == sup or sub transitively extends/implements sup.
// Throws Error naming the identifier if either name is undeclared.
bool subtype_of(std::string_view sub, std::string_view sup, const Program& p);

// Concrete classes C with subtype_of(C, t).
std::set<std::string> implementers_of(std::string_view t, const Program& p);

// Visits every statement (including nested blocks) in program order.
template <class F>
void for_each_stmt(const Block& block, F&& f) {
  for (const auto& s : block) {
    f(s);
    if (const auto* i = s.as<If>()) {
      for_each_stmt(i->then_block, f);
      for_each_stmt(i->else_block, f);
    } else if (const auto* w = s.as<While>()) {
      for_each_stmt(w->body, f);
    }
  }
}

template <class F>
void for_each_stmt_mut(Block& block, F&& f) {
  for (auto& s : block) {
    f(s);
    if (auto* i = s.as<If>()) {
      for_each_stmt_mut(i->then_block, f);
      for_each_stmt_mut(i->else_block, f);
    } else if (auto* w = s.as<While>()) {
      for_each_stmt_mut(w->body, f);
    }
  }
}

// Applies `f` to every method body in `data`, constructors included.
template <class F>
void for_each_body_mut(ProgramData& data, F&& f) {
  for (auto& c : data.classes) {
    for (auto& m : c.methods) f(m);
    for (auto& m : c.constructors) f(m);
  }
}

// Copy of `p` with every statement's provenance replaced by `f(old)`.
Program map_provenance(const Program& p, const std::function<Provenance(Provenance)>& f);

}  // namespace semconf
