#include "semconf/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "semconf/frontend.hpp"

namespace semconf {

namespace {

struct Sig {
  std::string name;
  std::vector<std::string> params;  // parameter types
  std::string ret;                  // "" for none
};

struct ClassPlan {
  std::string name;
  std::string super;
  std::vector<std::string> ifaces;
  std::vector<std::pair<std::string, std::string>> fields;   // name, type
  std::vector<std::pair<std::string, std::string>> statics;  // name, type
  bool ctor = false;
  std::vector<std::string> methods;  // signature names defined here
};

struct IfacePlan {
  std::string name;
  std::vector<std::string> methods;
};

bool is_array(const std::string& t) { return t.ends_with("[]"); }

class Generator {
public:
  Generator(std::uint64_t seed, const GeneratorConfig& cfg) : rng_(seed), cfg_(cfg) {}

  std::string run() {
    plan();
    std::ostringstream out;
    for (const auto& i : ifaces_) {
      out << "interface " << i.name << " {\n";
      for (const auto& m : i.methods) out << "  method " << m << "(" << param_list(sigs_.at(m)) << ");\n";
      out << "}\n";
    }
    for (std::size_t k = 0; k < classes_.size(); ++k) emit_class(out, static_cast<int>(k));
    emit_main(out);
    return out.str();
  }

private:
  std::mt19937_64 rng_;
  GeneratorConfig cfg_;
  std::vector<ClassPlan> classes_;
  std::vector<IfacePlan> ifaces_;
  std::map<std::string, Sig> sigs_;
  std::vector<std::string> helpers_;  // static methods of Main

  int pick(int n) { return n <= 0 ? 0 : static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  template <class T>
  const T& any(const std::vector<T>& v) { return v[static_cast<std::size_t>(pick(static_cast<int>(v.size())))]; }

  // ---- type structure

  const ClassPlan* cls(const std::string& name) const {
    for (const auto& c : classes_)
      if (c.name == name) return &c;
    return nullptr;
  }
  int class_index(const std::string& name) const {
    for (std::size_t k = 0; k < classes_.size(); ++k)
      if (classes_[k].name == name) return static_cast<int>(k);
    return -1;
  }
  const IfacePlan* iface(const std::string& name) const {
    for (const auto& i : ifaces_)
      if (i.name == name) return &i;
    return nullptr;
  }

  std::set<std::string> supers(const std::string& t) const {
    std::set<std::string> out{t};
    for (const ClassPlan* c = cls(t); c; c = c->super.empty() ? nullptr : cls(c->super)) {
      out.insert(c->name);
      out.insert(c->ifaces.begin(), c->ifaces.end());
    }
    return out;
  }
  bool assignable(const std::string& from, const std::string& to) const {
    if (from == to) return true;
    if (from == "int" || to == "int" || is_array(from) || is_array(to)) return false;
    return supers(from).contains(to);
  }
  std::vector<std::string> concrete_below(const std::string& t) const {
    std::vector<std::string> out;
    for (const auto& c : classes_)
      if (assignable(c.name, t)) out.push_back(c.name);
    return out;
  }
  std::vector<std::pair<std::string, std::string>> fields_of(const std::string& t) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const ClassPlan* c = cls(t); c; c = c->super.empty() ? nullptr : cls(c->super))
      out.insert(out.end(), c->fields.begin(), c->fields.end());
    return out;
  }
  std::vector<std::string> methods_of(const std::string& t) const {
    std::vector<std::string> out;
    if (const IfacePlan* i = iface(t)) return i->methods;
    for (const ClassPlan* c = cls(t); c; c = c->super.empty() ? nullptr : cls(c->super))
      for (const auto& m : c->methods)
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    return out;
  }
  std::vector<std::string> ref_types() const {
    std::vector<std::string> out;
    for (const auto& c : classes_) out.push_back(c.name);
    for (const auto& i : ifaces_) out.push_back(i.name);
    return out;
  }
  // Distinct interface methods a class implementing `ifaces` plus `extra` must define.
  int obligations(const std::vector<std::string>& ifaces, const std::string& extra) const {
    std::set<std::string> names;
    for (const auto& n : ifaces) names.insert(iface(n)->methods.begin(), iface(n)->methods.end());
    names.insert(iface(extra)->methods.begin(), iface(extra)->methods.end());
    return static_cast<int>(names.size());
  }
  std::string value_type() { return chance(0.4) ? std::string("int") : any(ref_types()); }

  std::string param_list(const Sig& s) const {
    std::string out;
    for (std::size_t i = 0; i < s.params.size(); ++i) out += (i ? ", p" : "p") + std::to_string(i);
    return out;
  }

  void plan() {
    const int n_classes = 1 + pick(cfg_.max_classes);
    const int n_ifaces = cfg_.straight_line ? 0 : pick(cfg_.max_interfaces + 1);
    for (int k = 0; k < n_classes; ++k) classes_.push_back({"C" + std::to_string(k), {}, {}, {}, {}, false, {}});
    for (int k = 0; k < n_ifaces; ++k) ifaces_.push_back({"I" + std::to_string(k), {}});

    // Signatures. Straight-line programs give every method its own name so
    // an unknown receiver type still resolves to a single target.
    auto make_sig = [&](const std::string& name) {
      Sig s{name, {}, {}};
      const int arity = pick(3);
      for (int i = 0; i < arity; ++i) s.params.push_back(value_type());
      if (chance(0.5)) s.ret = cfg_.straight_line ? "int" : value_type();
      sigs_[name] = s;
    };
    std::vector<std::string> pool;
    if (!cfg_.straight_line)
      for (int i = 0; i < 6; ++i) {
        pool.push_back("m" + std::to_string(i));
        make_sig(pool.back());
      }

    for (auto& i : ifaces_) {
      const int n = 1 + pick(std::min(2, cfg_.max_methods));
      for (int j = 0; j < n; ++j) {
        const auto& m = any(pool);
        if (std::find(i.methods.begin(), i.methods.end(), m) == i.methods.end()) i.methods.push_back(m);
      }
    }
    for (int k = 0; k < n_classes; ++k) {
      ClassPlan& c = classes_[static_cast<std::size_t>(k)];
      if (!cfg_.straight_line) {
        if (k > 0 && chance(0.4)) c.super = "C" + std::to_string(pick(k));
        for (const auto& i : ifaces_)
          if (chance(0.4) && obligations(c.ifaces, i.name) <= cfg_.max_methods) c.ifaces.push_back(i.name);
      }
      const int n_fields = pick(3);
      for (int j = 0; j < n_fields; ++j)
        c.fields.push_back({"f" + std::to_string(k) + "_" + std::to_string(j), value_type()});
      if (chance(0.4)) c.statics.push_back({"s" + std::to_string(k), value_type()});
      c.ctor = chance(0.6);
    }
    // Every interface gets at least one implementer, shrinking the interface
    // if no class has room for its methods.
    for (auto& i : ifaces_) {
      if (!concrete_below(i.name).empty()) continue;
      ClassPlan& c = classes_[static_cast<std::size_t>(pick(n_classes))];
      while (obligations(c.ifaces, i.name) > cfg_.max_methods) i.methods.pop_back();
      c.ifaces.push_back(i.name);
    }

    for (int k = 0; k < n_classes; ++k) {
      ClassPlan& c = classes_[static_cast<std::size_t>(k)];
      if (cfg_.straight_line) {
        const int n = 1 + pick(cfg_.max_methods);
        for (int j = 0; j < n; ++j) {
          c.methods.push_back("c" + std::to_string(k) + "m" + std::to_string(j));
          make_sig(c.methods.back());
        }
        continue;
      }
      // Interface obligations not already inherited.
      std::vector<std::string> inherited = c.super.empty() ? std::vector<std::string>{} : methods_of(c.super);
      for (const auto& in : supers(c.name))
        if (const IfacePlan* i = iface(in))
          for (const auto& m : i->methods)
            if (std::find(inherited.begin(), inherited.end(), m) == inherited.end() &&
                std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end())
              c.methods.push_back(m);
      const int extra = pick(cfg_.max_methods + 1);
      for (int j = 0; j < extra && static_cast<int>(c.methods.size()) < cfg_.max_methods; ++j) {
        const auto& m = any(pool);
        if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) c.methods.push_back(m);
      }
      if (c.methods.empty()) c.methods.push_back(any(pool));
    }
    if (chance(0.5)) {
      helpers_.push_back("h0");
      make_sig("h0");
    }
  }

  // ---- bodies

  // Position of the code being generated, for the straight-line call order:
  // a body may only call or allocate strictly later (class, method) pairs,
  // with constructors ordered before methods.
  struct Scope {
    int cls = -1;     // -1: Main
    int method = -1;  // -1: constructor or main
    std::map<std::string, std::string> types;
    std::set<std::string> nonnull;
    std::map<std::string, std::int64_t> sizes;  // array locals
    int next = 0;
    int remaining = 0;
    int indent = 2;
    std::vector<std::string> lines;
  };

  bool later(const Scope& s, int cls, int method) const {
    if (!cfg_.straight_line || s.cls < 0) return true;
    return cls > s.cls || (cls == s.cls && method > s.method);
  }

  std::string marker() {
    if (!chance(cfg_.marker_rate)) return "";
    return chance(0.5) ? " @L" : " @R";
  }
  void line(Scope& s, const std::string& text, bool simple = true) {
    s.lines.push_back(std::string(static_cast<std::size_t>(s.indent) * 2, ' ') + text +
                      (simple ? marker() + ";" : ""));
    --s.remaining;
  }
  std::string fresh(Scope& s, const std::string& type) {
    std::string n = "v" + std::to_string(s.next++);
    s.types[n] = type;
    return n;
  }
  std::vector<std::string> locals_where(const Scope& s, auto pred) const {
    std::vector<std::string> out;
    for (const auto& [n, t] : s.types)
      if (pred(n, t)) out.push_back(n);
    return out;
  }
  // Target for a value of type `t`: an existing compatible local or a new one.
  std::string target_for(Scope& s, const std::string& t) {
    auto existing = locals_where(s, [&](const std::string& n, const std::string& lt) {
      return n != "this" && !n.starts_with("p") && !is_array(lt) && assignable(t, lt);
    });
    if (!existing.empty() && chance(0.3)) return any(existing);
    return fresh(s, t);
  }
  // An operand of type `t`, or "" when none is at hand.
  std::string operand_for(Scope& s, const std::string& t) {
    if (t == "int" && chance(0.5)) return std::to_string(pick(4));
    auto c = locals_where(s, [&](const std::string&, const std::string& lt) { return assignable(lt, t); });
    if (!c.empty()) return any(c);
    return t == "int" ? std::to_string(pick(4)) : "";
  }
  std::vector<std::string> receivers(const Scope& s, bool arrays) const {
    return locals_where(s, [&](const std::string& n, const std::string& t) {
      if (t == "int" || is_array(t) != arrays) return false;
      if (s.nonnull.contains(n)) return true;
      return !cfg_.straight_line && n.starts_with("p");
    });
  }
  void assign_ref(Scope& s, const std::string& target, bool nonnull) {
    if (nonnull)
      s.nonnull.insert(target);
    else
      s.nonnull.erase(target);
  }

  bool gen_alloc(Scope& s) {
    std::vector<std::string> ok;
    for (std::size_t k = 0; k < classes_.size(); ++k)
      if (later(s, static_cast<int>(k), -1)) ok.push_back(classes_[k].name);
    if (ok.empty()) return false;
    const std::string c = any(ok);
    const std::string t = target_for(s, c);
    assign_ref(s, t, true);
    line(s, t + " = new " + c + "()");
    return true;
  }
  bool gen_mkref(Scope& s) {
    if (!cfg_.allow_mkref) return false;
    const std::string c = any(ref_types());
    const std::string t = fresh(s, c);
    line(s, t + " = mkref " + c);
    return true;
  }
  bool gen_int(Scope& s) {
    const std::string t = target_for(s, "int");
    if (chance(0.5)) {
      line(s, t + " = " + std::to_string(pick(5)));
    } else {
      std::string args;
      for (int i = pick(3); i > 0; --i) {
        auto o = operand_for(s, "int");
        args += (args.empty() ? "" : ", ") + o;
      }
      line(s, t + " = op(" + args + ")");
    }
    return true;
  }
  bool gen_copy(Scope& s) {
    auto src = locals_where(s, [](const std::string&, const std::string& t) { return !is_array(t); });
    if (src.empty()) return false;
    const std::string from = any(src);
    const std::string t = target_for(s, s.types.at(from));
    if (t == from) return false;
    assign_ref(s, t, s.nonnull.contains(from));
    line(s, t + " = " + from);
    return true;
  }
  bool gen_field_store(Scope& s) {
    auto bases = receivers(s, false);
    std::erase_if(bases, [&](const std::string& b) { return fields_of(s.types.at(b)).empty(); });
    if (bases.empty()) return false;
    const std::string b = any(bases);
    const auto [f, ft] = any(fields_of(s.types.at(b)));
    const std::string v = operand_for(s, ft);
    if (v.empty()) return false;
    line(s, b + "." + f + " = " + v);
    return true;
  }
  bool gen_field_load(Scope& s) {
    auto bases = receivers(s, false);
    std::erase_if(bases, [&](const std::string& b) { return fields_of(s.types.at(b)).empty(); });
    if (bases.empty()) return false;
    const std::string b = any(bases);
    const auto [f, ft] = any(fields_of(s.types.at(b)));
    const std::string t = target_for(s, ft);
    assign_ref(s, t, false);
    line(s, t + " = " + b + "." + f);
    return true;
  }
  bool gen_static(Scope& s) {
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> all;
    for (const auto& c : classes_)
      for (const auto& f : c.statics) all.push_back({c.name, f});
    if (all.empty()) return false;
    const auto& [c, field] = any(all);
    if (chance(0.5)) {
      const std::string v = operand_for(s, field.second);
      if (v.empty()) return false;
      line(s, c + "::" + field.first + " = " + v);
    } else {
      const std::string t = target_for(s, field.second);
      assign_ref(s, t, false);
      line(s, t + " = " + c + "::" + field.first);
    }
    return true;
  }
  bool gen_array(Scope& s) {
    auto arrays = receivers(s, true);
    const int choice = pick(3);
    if (arrays.empty() || choice == 0) {
      const std::string elem = chance(0.5) ? std::string("int") : any(ref_types());
      const std::int64_t n = 1 + pick(4);
      const std::string t = fresh(s, elem + "[]");
      s.nonnull.insert(t);
      s.sizes[t] = n;
      line(s, t + " = newarr " + elem + " " + std::to_string(n));
      return true;
    }
    const std::string a = any(arrays);
    const std::string elem = s.types.at(a).substr(0, s.types.at(a).size() - 2);
    std::string idx = std::to_string(pick(static_cast<int>(s.sizes.at(a))));
    if (!cfg_.straight_line && chance(0.2)) {
      auto ints = locals_where(s, [](const std::string&, const std::string& t) { return t == "int"; });
      if (!ints.empty()) idx = any(ints);
    }
    if (choice == 1) {
      const std::string v = operand_for(s, elem);
      if (v.empty()) return false;
      line(s, a + "[" + idx + "] = " + v);
    } else {
      const std::string t = target_for(s, elem);
      assign_ref(s, t, false);
      line(s, t + " = " + a + "[" + idx + "]");
    }
    return true;
  }
  std::string args_for(Scope& s, const Sig& sig, bool& ok) {
    std::string out;
    for (const auto& pt : sig.params) {
      std::string o = operand_for(s, pt);
      if (o.empty()) ok = false;
      out += (out.empty() ? "" : ", ") + o;
    }
    return out;
  }
  void bind_result(Scope& s, const Sig& sig, const std::string& call) {
    if (!sig.ret.empty() && chance(0.7)) {
      const std::string t = target_for(s, sig.ret);
      assign_ref(s, t, false);
      line(s, t + " = " + call);
    } else {
      line(s, "call " + call);
    }
  }
  bool gen_call(Scope& s) {
    std::vector<std::pair<std::string, std::string>> options;  // receiver, method
    for (const auto& r : receivers(s, false))
      for (const auto& m : methods_of(s.types.at(r))) {
        if (cfg_.straight_line) {
          const int k = class_index(s.types.at(r));
          const auto& ms = classes_[static_cast<std::size_t>(k)].methods;
          const int j = static_cast<int>(std::find(ms.begin(), ms.end(), m) - ms.begin());
          if (!later(s, k, j)) continue;
        }
        options.push_back({r, m});
      }
    if (!cfg_.straight_line && !helpers_.empty()) options.push_back({"", helpers_.front()});
    if (options.empty()) return false;
    const auto& [r, m] = any(options);
    const Sig& sig = sigs_.at(m);
    bool ok = true;
    const std::string args = args_for(s, sig, ok);
    if (!ok) return false;
    bind_result(s, sig, (r.empty() ? "Main::" : r + ".") + m + "(" + args + ")");
    return true;
  }
  std::string cond(Scope& s) {
    auto ints = locals_where(s, [](const std::string& n, const std::string& t) { return t == "int" && !n.starts_with("p"); });
    if (!ints.empty() && chance(0.6)) return any(ints);
    const std::string c = fresh(s, "int");
    line(s, c + " = op(" + std::to_string(pick(5)) + ")");
    return c;
  }
  bool gen_if(Scope& s) {
    if (cfg_.straight_line || s.remaining < 4 || s.indent > 3) return false;
    const std::string c = cond(s);
    line(s, "if " + c + " {", false);
    const auto saved = s.nonnull;
    ++s.indent;
    block(s, 1 + pick(3));
    --s.indent;
    s.nonnull = saved;
    if (chance(0.5)) {
      line(s, "} else {", false);
      ++s.indent;
      block(s, 1 + pick(3));
      --s.indent;
      s.nonnull = saved;
    }
    line(s, "}", false);
    return true;
  }
  bool gen_while(Scope& s) {
    if (cfg_.straight_line || s.remaining < 4 || s.indent > 3) return false;
    const std::string c = cond(s);
    line(s, "while " + c + " {", false);
    const auto saved = s.nonnull;
    ++s.indent;
    block(s, 1 + pick(3));
    line(s, c + " = 0");
    --s.indent;
    s.nonnull = saved;
    line(s, "}", false);
    return true;
  }

  void statement(Scope& s) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      bool done = false;
      switch (pick(12)) {
        case 0: case 1: done = gen_alloc(s); break;
        case 2: done = gen_int(s); break;
        case 3: done = gen_copy(s); break;
        case 4: done = gen_field_store(s); break;
        case 5: done = gen_field_load(s); break;
        case 6: done = gen_static(s); break;
        case 7: done = gen_array(s); break;
        case 8: case 9: done = gen_call(s); break;
        case 10: done = chance(0.5) ? gen_if(s) : gen_while(s); break;
        case 11: done = chance(0.2) ? gen_mkref(s) : gen_field_store(s); break;
      }
      if (done) return;
    }
    gen_int(s);
  }
  void block(Scope& s, int n) {
    for (int i = 0; i < n && s.remaining > 0; ++i) statement(s);
  }

  std::vector<std::string> body(int cls, int method, const std::string& self, const Sig* sig, int budget) {
    Scope s;
    s.cls = cls;
    s.method = method;
    s.remaining = budget;
    if (!self.empty()) {
      s.types["this"] = self;
      s.nonnull.insert("this");
    }
    if (sig)
      for (std::size_t i = 0; i < sig->params.size(); ++i) s.types["p" + std::to_string(i)] = sig->params[i];
    // Main starts from a populated heap.
    if (cls < 0 && method < 0) gen_alloc(s);
    block(s, std::max(1, budget - 1));
    if (sig && !sig->ret.empty()) {
      auto c = locals_where(s, [&](const std::string&, const std::string& t) { return assignable(t, sig->ret); });
      std::string r;
      if (!c.empty()) {
        r = any(c);
      } else if (sig->ret == "int") {
        r = fresh(s, "int");
        line(s, r + " = op()");
      } else {
        r = fresh(s, sig->ret);
        line(s, r + " = new " + any(concrete_below(sig->ret)) + "()");
      }
      s.lines.push_back(std::string(static_cast<std::size_t>(s.indent) * 2, ' ') + "return " + r + ";");
    }
    return s.lines;
  }

  void emit_lines(std::ostream& out, const std::vector<std::string>& lines) {
    for (const auto& l : lines) out << l << '\n';
  }

  void emit_class(std::ostream& out, int k) {
    const ClassPlan& c = classes_[static_cast<std::size_t>(k)];
    out << "class " << c.name;
    if (!c.super.empty()) out << " extends " << c.super;
    for (std::size_t i = 0; i < c.ifaces.size(); ++i) out << (i ? ", " : " implements ") << c.ifaces[i];
    out << " {\n";
    for (const auto& [f, t] : c.fields) out << "  field " << f << ": " << t << ";\n";
    for (const auto& [f, t] : c.statics) out << "  field static " << f << ": " << t << ";\n";
    if (c.ctor) {
      out << "  ctor() {\n";
      emit_lines(out, body(k, -1, c.name, nullptr, std::max(1, cfg_.max_stmts / 2)));
      out << "  }\n";
    }
    for (std::size_t j = 0; j < c.methods.size(); ++j) {
      const Sig& sig = sigs_.at(c.methods[j]);
      out << "  public method " << sig.name << "(" << param_list(sig) << ") {\n";
      emit_lines(out, body(k, static_cast<int>(j), c.name, &sig, 1 + pick(cfg_.max_stmts)));
      out << "  }\n";
    }
    out << "}\n";
  }

  void emit_main(std::ostream& out) {
    out << "class Main {\n";
    out << "  public static method main() {\n";
    emit_lines(out, body(-1, -1, "", nullptr, cfg_.max_stmts));
    out << "  }\n";
    for (const auto& h : helpers_) {
      const Sig& sig = sigs_.at(h);
      out << "  public static method " << h << "(" << param_list(sig) << ") {\n";
      // Helpers sit after every class in the call order.
      emit_lines(out, body(static_cast<int>(classes_.size()), 0, "", &sig, 1 + pick(cfg_.max_stmts / 2)));
      out << "  }\n";
    }
    out << "}\n";
  }
};

}  // namespace

GeneratedProgram generate_program(std::uint64_t seed, const GeneratorConfig& cfg) {
  GeneratedProgram g;
  g.seed = seed;
  g.file = "Gen" + std::to_string(seed) + ".mir";
  g.source = Generator(seed, cfg).run();
  g.program = parse_program({{g.file, g.source}});
  return g;
}

std::uint64_t base_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("OA_SEED"); s && *s) return std::strtoull(s, nullptr, 10);
  return fallback;
}

}  // namespace semconf
