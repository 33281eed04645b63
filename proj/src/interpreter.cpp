#include "semconf/interpreter.hpp"

#include <map>

#include "semconf/pointsto.hpp"

namespace semconf {

namespace {

constexpr std::size_t kMaxCallDepth = 200;

struct Value {
  enum class Kind : std::uint8_t { Null, Int, Str, Ref };
  Kind kind = Kind::Null;
  std::int64_t i = 0;
  std::string s;
  std::size_t obj = 0;

  bool truthy() const { return kind == Kind::Ref || (kind == Kind::Int && i != 0) || (kind == Kind::Str && !s.empty()); }
};

struct Object {
  std::size_t site = 0;
  std::string cls;
  bool is_array = false;
  std::map<std::string, Value> fields;
  std::vector<Value> elements;
};

struct Fault {
  std::string what;
};
struct Truncate {};

struct Frame {
  const MethodDef* method = nullptr;
  std::map<std::string, Value> locals;
  Provenance inherited = Provenance::Base;
  std::vector<SourcePos> call_path;
  std::vector<MethodId> frames;
};

enum class Flow { Normal, Returned };

class Machine {
public:
  Machine(const Program& p, std::uint64_t limit)
      : p_(p), types_(p), keys_(p, types_), limit_(limit) {
    for (const auto& s : collect_alloc_sites(p)) site_at_.emplace(s.pos, s.id);
  }

  Trace run(const MethodDef& main) {
    Frame f;
    f.method = &main;
    f.frames.push_back(main.id());
    try {
      invoke(f);
    } catch (const Fault& e) {
      trace_.aborted = true;
      trace_.fault = e.what;
    } catch (const Truncate&) {
      trace_.truncated = true;
    }
    return std::move(trace_);
  }

private:
  const Program& p_;
  StaticTypes types_;
  ElementKeys keys_;
  std::uint64_t limit_;
  std::map<SourcePos, std::size_t> site_at_;
  std::vector<Object> heap_;
  std::map<std::pair<std::string, std::string>, Value> statics_;
  Trace trace_;

  static Provenance effective(const Stmt& s, const Frame& f) {
    return s.provenance != Provenance::Base ? s.provenance : f.inherited;
  }

  void write(const Frame& f, const Stmt& s, StateElementKey key) {
    const MethodDef& m = *f.method;
    trace_.writes.push_back({std::move(key), s.pos, effective(s, f), m.id(), m.kind, f.call_path, f.frames});
  }

  void bind(Frame& f, const std::string& local, Value v) {
    if (v.kind == Value::Kind::Ref) trace_.bindings.push_back({f.method->id(), local, heap_[v.obj].site});
    f.locals[local] = std::move(v);
  }

  Value read(const Frame& f, const std::string& local) const {
    auto it = f.locals.find(local);
    return it == f.locals.end() ? Value{} : it->second;
  }

  Value eval(const Frame& f, const Operand& o) const {
    switch (o.kind) {
      case Operand::Kind::Local: return read(f, o.text);
      case Operand::Kind::Int: return {Value::Kind::Int, o.value, {}, 0};
      case Operand::Kind::Str: return {Value::Kind::Str, 0, o.text, 0};
    }
    return {};
  }

  Object& deref(const Value& v, const char* what) {
    if (v.kind != Value::Kind::Ref) throw Fault{std::string(what) + " on a non-reference"};
    return heap_[v.obj];
  }

  std::string static_owner(const std::string& cls, const std::string& field) const {
    auto f = p_.find_field(cls, field, true);
    return f ? f->declaring->name : cls;
  }

  // FNV-1a over the operand values.
  Value opaque(const Frame& f, const std::vector<Operand>& operands) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t x) {
      for (int b = 0; b < 8; ++b) {
        h ^= (x >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    for (const auto& o : operands) {
      Value v = eval(f, o);
      mix(static_cast<std::uint64_t>(v.kind));
      if (v.kind == Value::Kind::Int) mix(static_cast<std::uint64_t>(v.i));
      if (v.kind == Value::Kind::Ref) mix(v.obj);
      for (char c : v.s) mix(static_cast<unsigned char>(c));
    }
    return {Value::Kind::Int, static_cast<std::int64_t>(h % 7), {}, 0};
  }

  std::size_t element_index(const Frame& f, const Object& arr, const Operand& idx) const {
    Value v = eval(f, idx);
    if (v.kind != Value::Kind::Int || v.i < 0 || static_cast<std::size_t>(v.i) >= arr.elements.size())
      throw Fault{"array index out of range"};
    return static_cast<std::size_t>(v.i);
  }

  // Runs a callee with `self` and arguments bound; returns its result.
  Value call(Frame& caller, const Stmt& s, const MethodDef& target, const Value* self,
             const std::vector<Operand>& args) {
    if (caller.frames.size() >= kMaxCallDepth) throw Truncate{};
    Frame f;
    f.method = &target;
    f.inherited = effective(s, caller);
    f.call_path = caller.call_path;
    f.call_path.push_back(s.pos);
    f.frames = caller.frames;
    f.frames.push_back(target.id());
    if (self) bind(f, "this", *self);
    for (std::size_t i = 0; i < target.params.size(); ++i)
      bind(f, target.params[i], i < args.size() ? eval(caller, args[i]) : Value{});
    return invoke(f);
  }

  Value invoke(Frame& f) {
    Value result;
    exec(f, f.method->body, result);
    return result;
  }

  Flow exec(Frame& f, const Block& block, Value& result) {
    for (const auto& s : block)
      if (step(f, s, result) == Flow::Returned) return Flow::Returned;
    return Flow::Normal;
  }

  Flow step(Frame& f, const Stmt& s, Value& result) {
    if (++trace_.steps > limit_) throw Truncate{};
    const MethodId here = f.method->id();
    return std::visit(
        [&](const auto& k) -> Flow {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, AllocAssign>) {
            const MethodDef* cls_ctor = p_.find_ctor(k.cls, k.args.size());
            heap_.push_back({site_at_.at(s.pos), k.cls, false, {}, {}});
            Value obj{Value::Kind::Ref, 0, {}, heap_.size() - 1};
            if (cls_ctor) call(f, s, *cls_ctor, &obj, k.args);
            bind(f, k.target, obj);
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, ReflectiveAssign>) {
            throw Error("oracle cannot execute reflective instantiation");
          } else if constexpr (std::is_same_v<T, CopyAssign>) {
            bind(f, k.target, eval(f, k.source));
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, FieldStore>) {
            deref(read(f, k.base), "field store").fields[k.field] = eval(f, k.source);
            write(f, s, keys_.field(here, k.base, k.field));
          } else if constexpr (std::is_same_v<T, FieldLoad>) {
            const Object& o = deref(read(f, k.base), "field load");
            auto it = o.fields.find(k.field);
            bind(f, k.target, it == o.fields.end() ? Value{} : it->second);
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, StaticStore>) {
            statics_[{static_owner(k.cls, k.field), k.field}] = eval(f, k.source);
            write(f, s, keys_.static_field(k.cls, k.field));
          } else if constexpr (std::is_same_v<T, StaticLoad>) {
            auto it = statics_.find({static_owner(k.cls, k.field), k.field});
            bind(f, k.target, it == statics_.end() ? Value{} : it->second);
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, ArrayAlloc>) {
            if (k.size < 0) throw Fault{"negative array size"};
            Object arr{site_at_.at(s.pos), k.elem_type, true, {}, {}};
            arr.elements.resize(static_cast<std::size_t>(k.size));
            heap_.push_back(std::move(arr));
            bind(f, k.target, {Value::Kind::Ref, 0, {}, heap_.size() - 1});
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, ArrayStore>) {
            Object& arr = deref(read(f, k.base), "array store");
            if (!arr.is_array) throw Fault{"array store on an object"};
            arr.elements[element_index(f, arr, k.index)] = eval(f, k.source);
            write(f, s, keys_.array(here, k.base, k.index));
          } else if constexpr (std::is_same_v<T, ArrayLoad>) {
            const Object& arr = deref(read(f, k.base), "array load");
            if (!arr.is_array) throw Fault{"array load on an object"};
            bind(f, k.target, arr.elements[element_index(f, arr, k.index)]);
            write(f, s, keys_.local(k.target));
          } else if constexpr (std::is_same_v<T, VirtualCall>) {
            Value self = read(f, k.receiver);
            const Object& o = deref(self, "call");
            if (o.is_array) throw Fault{"call on an array"};
            const MethodDef* target = p_.dispatch(o.cls, k.method, k.args.size());
            if (!target) throw Fault{"no method " + k.method + " in " + o.cls};
            trace_.dispatches.push_back({s.pos, target->id()});
            Value r = call(f, s, *target, &self, k.args);
            if (k.result) {
              bind(f, *k.result, std::move(r));
              write(f, s, keys_.local(*k.result));
            }
          } else if constexpr (std::is_same_v<T, StaticCall>) {
            const MethodDef* target = p_.find_static_method(k.cls, k.method, k.args.size());
            if (!target) throw Fault{"no static method " + k.cls + "::" + k.method};
            Value r = call(f, s, *target, nullptr, k.args);
            if (k.result) {
              bind(f, *k.result, std::move(r));
              write(f, s, keys_.local(*k.result));
            }
          } else if constexpr (std::is_same_v<T, If>) {
            return exec(f, read(f, k.cond).truthy() ? k.then_block : k.else_block, result);
          } else if constexpr (std::is_same_v<T, While>) {
            while (read(f, k.cond).truthy())
              if (exec(f, k.body, result) == Flow::Returned) return Flow::Returned;
          } else if constexpr (std::is_same_v<T, Return>) {
            if (k.value) result = read(f, *k.value);
            return Flow::Returned;
          } else if constexpr (std::is_same_v<T, OpaqueOp>) {
            bind(f, k.target, opaque(f, k.operands));
            write(f, s, keys_.local(k.target));
          }
          return Flow::Normal;
        },
        s.kind);
  }
};

}  // namespace

Trace interpret(const Program& p, const MethodDef& main, std::uint64_t step_limit) {
  return Machine(p, step_limit).run(main);
}

}  // namespace semconf
