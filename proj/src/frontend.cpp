#include "semconf/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace semconf {

int SourceUnit::line_count() const {
  if (text.empty()) return 0;
  int n = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  return text.back() == '\n' ? n : n + 1;
}

SourceUnit SourceUnit::load(const std::filesystem::path& file, std::string display_path) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return {display_path.empty() ? file.string() : std::move(display_path), ss.str()};
}

namespace {

enum class Tok { Ident, Int, Str, Punct, Marker, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 0;
};

std::vector<Token> lex(const SourceUnit& unit) {
  std::vector<Token> out;
  const std::string& s = unit.text;
  int line = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) { throw ParseError({unit.path, line}, msg); };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), line});
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string lit;
      while (j < s.size() && s[j] != '"' && s[j] != '\n') {
        if (s[j] == '\\' && j + 1 < s.size()) ++j;
        lit += s[j++];
      }
      if (j >= s.size() || s[j] != '"') fail("unterminated string literal");
      out.push_back({Tok::Str, lit, line});
      i = j + 1;
    } else if (c == '@') {
      if (i + 1 < s.size() && (s[i + 1] == 'L' || s[i + 1] == 'R') &&
          (i + 2 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 2])))) {
        out.push_back({Tok::Marker, s.substr(i, 2), line});
        i += 2;
      } else {
        fail("unknown marker (expected @L or @R)");
      }
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == ':') {
      out.push_back({Tok::Punct, "::", line});
      i += 2;
    } else if (std::string_view("{}();:,.=[]").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), line});
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line});
  return out;
}

const std::set<std::string, std::less<>> kKeywords = {
    "class", "interface", "extends", "implements", "field", "static", "public", "private",
    "method", "ctor", "if", "else", "while", "new", "mkref", "newarr", "call", "return", "op"};

class Parser {
public:
  Parser(const SourceUnit& unit, ProgramData& out) : unit_(unit), toks_(lex(unit)), out_(out) {}

  void run() {
    while (!at_end()) {
      if (peek_kw("class"))
        parse_class();
      else if (peek_kw("interface"))
        parse_interface();
      else
        fail("expected 'class' or 'interface'");
    }
  }

private:
  const SourceUnit& unit_;
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  ProgramData& out_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(at_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  SourcePos here() const { return {unit_.path, peek().line}; }

  [[noreturn]] void fail(const std::string& expected) const {
    const auto& t = peek();
    std::string got = t.kind == Tok::End ? "end of file" : "'" + t.text + "'";
    throw ParseError(here(), expected + ", got " + got);
  }

  bool peek_kw(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
  }
  bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  void expect_kw(std::string_view kw) {
    if (!peek_kw(kw)) fail("expected '" + std::string(kw) + "'");
    ++at_;
  }
  void expect(std::string_view p) {
    if (!peek_punct(p)) fail("expected '" + std::string(p) + "'");
    ++at_;
  }
  bool accept(std::string_view p) {
    if (!peek_punct(p)) return false;
    ++at_;
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!peek_kw(kw)) return false;
    ++at_;
    return true;
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident || kKeywords.contains(peek().text))
      fail(std::string("expected ") + what);
    return toks_[at_++].text;
  }
  std::string type_name() {
    std::string t = ident("type name");
    if (peek_punct("[") && peek_punct("]", 1)) {
      at_ += 2;
      t += "[]";
    }
    return t;
  }
  std::int64_t integer() {
    if (peek().kind != Tok::Int) fail("expected integer");
    return std::stoll(toks_[at_++].text);
  }
  Operand atom() {
    const auto& t = peek();
    if (t.kind == Tok::Int) return Operand::integer(integer());
    if (t.kind == Tok::Str) {
      ++at_;
      return Operand::string(t.text);
    }
    return Operand::local(ident("operand"));
  }
  std::vector<Operand> args() {
    std::vector<Operand> out;
    expect("(");
    if (!peek_punct(")")) {
      do out.push_back(atom());
      while (accept(","));
    }
    expect(")");
    return out;
  }
  std::vector<std::string> params() {
    std::vector<std::string> out;
    expect("(");
    if (!peek_punct(")")) {
      do out.push_back(ident("parameter name"));
      while (accept(","));
    }
    expect(")");
    return out;
  }

  void parse_class() {
    ClassDef c;
    c.pos = here();
    expect_kw("class");
    c.name = ident("class name");
    if (accept_kw("extends")) c.superclass = ident("superclass name");
    if (accept_kw("implements")) {
      do c.interfaces.push_back(ident("interface name"));
      while (accept(","));
    }
    expect("{");
    while (!accept("}")) {
      if (at_end()) fail("expected '}'");
      parse_member(c);
    }
    out_.classes.push_back(std::move(c));
  }

  void parse_interface() {
    InterfaceDef i;
    i.pos = here();
    expect_kw("interface");
    i.name = ident("interface name");
    if (accept_kw("extends")) i.extends = ident("interface name");
    expect("{");
    while (!accept("}")) {
      if (at_end()) fail("expected '}'");
      accept_kw("public");
      expect_kw("method");
      MethodSig sig;
      sig.name = ident("method name");
      sig.arity = params().size();
      expect(";");
      i.methods.push_back(std::move(sig));
    }
    out_.interfaces.push_back(std::move(i));
  }

  void parse_member(ClassDef& c) {
    SourcePos pos = here();
    if (accept_kw("field")) {
      FieldDef f;
      f.is_static = accept_kw("static");
      f.name = ident("field name");
      expect(":");
      f.type = type_name();
      expect(";");
      c.fields.push_back(std::move(f));
      return;
    }
    if (accept_kw("ctor")) {
      MethodDef m;
      m.pos = pos;
      m.name = std::string(kCtorName);
      m.kind = MethodKind::Constructor;
      m.is_public = true;
      m.declaring_class = c.name;
      m.params = params();
      m.body = block();
      c.constructors.push_back(std::move(m));
      return;
    }
    MethodDef m;
    m.pos = pos;
    if (accept_kw("public"))
      m.is_public = true;
    else
      accept_kw("private");
    m.is_static = accept_kw("static");
    expect_kw("method");
    m.name = ident("method name");
    m.declaring_class = c.name;
    m.params = params();
    m.body = block();
    c.methods.push_back(std::move(m));
  }

  Block block() {
    Block out;
    expect("{");
    while (!accept("}")) {
      if (at_end()) fail("expected '}'");
      out.push_back(statement());
    }
    return out;
  }

  Stmt statement() {
    Stmt s;
    s.pos = here();
    if (accept_kw("if")) {
      If node;
      node.cond = ident("condition local");
      node.then_block = block();
      if (accept_kw("else")) node.else_block = block();
      s.kind = std::move(node);
      return s;
    }
    if (accept_kw("while")) {
      While node;
      node.cond = ident("condition local");
      node.body = block();
      s.kind = std::move(node);
      return s;
    }
    s.kind = simple();
    if (peek().kind == Tok::Marker) {
      s.provenance = peek().text == "@L" ? Provenance::Left : Provenance::Right;
      ++at_;
    }
    expect(";");
    return s;
  }

  // callexpr after the leading identifier has been consumed
  template <class Result>
  Stmt::Kind call_tail(const std::string& head, Result result) {
    if (accept(".")) {
      VirtualCall c;
      c.receiver = head;
      c.method = ident("method name");
      c.args = args();
      c.result = std::move(result);
      return c;
    }
    expect("::");
    StaticCall c;
    c.cls = head;
    c.method = ident("method name");
    c.args = args();
    c.result = std::move(result);
    return c;
  }

  Stmt::Kind simple() {
    if (accept_kw("call")) {
      std::string head = ident("receiver or class name");
      if (!peek_punct(".") && !peek_punct("::")) fail("expected '.' or '::'");
      return call_tail(head, std::optional<std::string>{});
    }
    if (accept_kw("return")) {
      Return r;
      if (peek().kind == Tok::Ident && !kKeywords.contains(peek().text)) r.value = ident();
      return r;
    }

    std::string head = ident("statement");
    if (accept(".")) {
      std::string field = ident("field name");
      expect("=");
      return FieldStore{head, field, store_source()};
    }
    if (accept("[")) {
      Operand idx = index();
      expect("]");
      expect("=");
      return ArrayStore{head, idx, store_source()};
    }
    if (accept("::")) {
      std::string field = ident("field name");
      expect("=");
      return StaticStore{head, field, store_source()};
    }
    expect("=");
    return local_rhs(head);
  }

  Operand index() {
    if (peek().kind == Tok::Int) return Operand::integer(integer());
    return Operand::local(ident("index"));
  }

  Operand store_source() {
    if (peek().kind == Tok::Ident && !kKeywords.contains(peek().text) &&
        (peek_punct(".", 1) || peek_punct("[", 1) || peek_punct("::", 1)))
      fail("expected local or constant (stores take a local or constant source)");
    return atom();
  }

  Stmt::Kind local_rhs(const std::string& target) {
    if (accept_kw("new")) {
      AllocAssign a{target, ident("class name"), {}};
      a.args = args();
      return a;
    }
    if (accept_kw("mkref")) return ReflectiveAssign{target, ident("type name")};
    if (accept_kw("newarr")) {
      ArrayAlloc a;
      a.target = target;
      a.elem_type = type_name();
      a.size = integer();
      return a;
    }
    if (accept_kw("op")) return OpaqueOp{target, args()};
    if (peek().kind == Tok::Int || peek().kind == Tok::Str) return CopyAssign{target, atom()};

    std::string head = ident("expression");
    if (peek_punct(".") && peek(1).kind == Tok::Ident && peek_punct("(", 2))
      return call_tail(head, std::optional<std::string>(target));
    if (peek_punct("::") && peek(1).kind == Tok::Ident && peek_punct("(", 2))
      return call_tail(head, std::optional<std::string>(target));
    if (accept(".")) return FieldLoad{target, head, ident("field name")};
    if (accept("::")) return StaticLoad{target, head, ident("field name")};
    if (accept("[")) {
      Operand idx = index();
      expect("]");
      return ArrayLoad{target, head, idx};
    }
    return CopyAssign{target, Operand::local(head)};
  }
};

}  // namespace

Program parse_program(const std::vector<SourceUnit>& units) {
  ProgramData data;
  for (const auto& u : units) Parser(u, data).run();
  Program p(std::move(data));
  auto diags = validate_program(p);
  if (!diags.empty()) throw ParseError(diags.front().pos, diags.front().message);
  return p;
}

namespace {

class Printer {
public:
  std::string run(const Program& p) {
    for (const auto& i : p.interfaces()) interface(i);
    for (const auto& c : p.classes()) cls(c);
    return out_.str();
  }

private:
  std::ostringstream out_;

  void indent(int depth) { out_ << std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  static std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s;
  }
  static std::string join(const std::vector<Operand>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i].str();
    return s;
  }

  void interface(const InterfaceDef& i) {
    out_ << "interface " << i.name;
    if (i.extends) out_ << " extends " << *i.extends;
    out_ << " {\n";
    for (const auto& m : i.methods) {
      std::vector<std::string> ps;
      for (std::size_t k = 0; k < m.arity; ++k) ps.push_back("p" + std::to_string(k));
      out_ << "  method " << m.name << "(" << join(ps) << ");\n";
    }
    out_ << "}\n";
  }

  void cls(const ClassDef& c) {
    out_ << "class " << c.name;
    if (c.superclass) out_ << " extends " << *c.superclass;
    if (!c.interfaces.empty()) out_ << " implements " << join(c.interfaces);
    out_ << " {\n";
    for (const auto& f : c.fields)
      out_ << "  field " << (f.is_static ? "static " : "") << f.name << ": " << f.type << ";\n";
    for (const auto& m : c.constructors) {
      out_ << "  ctor(" << join(m.params) << ") {\n";
      block(m.body, 2);
      out_ << "  }\n";
    }
    for (const auto& m : c.methods) {
      out_ << "  " << (m.is_public ? "public " : "private ") << (m.is_static ? "static " : "")
           << "method " << m.name << "(" << join(m.params) << ") {\n";
      block(m.body, 2);
      out_ << "  }\n";
    }
    out_ << "}\n";
  }

  void block(const Block& b, int depth) {
    for (const auto& s : b) stmt(s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    if (const auto* i = s.as<If>()) {
      out_ << "if " << i->cond << " {\n";
      block(i->then_block, depth + 1);
      indent(depth);
      out_ << "}";
      if (!i->else_block.empty()) {
        out_ << " else {\n";
        block(i->else_block, depth + 1);
        indent(depth);
        out_ << "}";
      }
      out_ << "\n";
      return;
    }
    if (const auto* w = s.as<While>()) {
      out_ << "while " << w->cond << " {\n";
      block(w->body, depth + 1);
      indent(depth);
      out_ << "}\n";
      return;
    }
    out_ << simple(s);
    if (s.provenance == Provenance::Left) out_ << " @L";
    if (s.provenance == Provenance::Right) out_ << " @R";
    out_ << ";\n";
  }

  static std::string call_text(const std::string& head, const char* sep, const std::string& m,
                               const std::vector<Operand>& args) {
    return head + sep + m + "(" + join(args) + ")";
  }

  static std::string simple(const Stmt& s) {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, AllocAssign>)
            return k.target + " = new " + k.cls + "(" + join(k.args) + ")";
          else if constexpr (std::is_same_v<T, ReflectiveAssign>)
            return k.target + " = mkref " + k.type;
          else if constexpr (std::is_same_v<T, CopyAssign>)
            return k.target + " = " + k.source.str();
          else if constexpr (std::is_same_v<T, FieldStore>)
            return k.base + "." + k.field + " = " + k.source.str();
          else if constexpr (std::is_same_v<T, FieldLoad>)
            return k.target + " = " + k.base + "." + k.field;
          else if constexpr (std::is_same_v<T, StaticStore>)
            return k.cls + "::" + k.field + " = " + k.source.str();
          else if constexpr (std::is_same_v<T, StaticLoad>)
            return k.target + " = " + k.cls + "::" + k.field;
          else if constexpr (std::is_same_v<T, ArrayAlloc>)
            return k.target + " = newarr " + k.elem_type + " " + std::to_string(k.size);
          else if constexpr (std::is_same_v<T, ArrayStore>)
            return k.base + "[" + k.index.str() + "] = " + k.source.str();
          else if constexpr (std::is_same_v<T, ArrayLoad>)
            return k.target + " = " + k.base + "[" + k.index.str() + "]";
          else if constexpr (std::is_same_v<T, VirtualCall>)
            return (k.result ? *k.result + " = " : std::string("call ")) +
                   call_text(k.receiver, ".", k.method, k.args);
          else if constexpr (std::is_same_v<T, StaticCall>)
            return (k.result ? *k.result + " = " : std::string("call ")) +
                   call_text(k.cls, "::", k.method, k.args);
          else if constexpr (std::is_same_v<T, Return>)
            return k.value ? "return " + *k.value : std::string("return");
          else if constexpr (std::is_same_v<T, OpaqueOp>)
            return k.target + " = op(" + join(k.operands) + ")";
          else
            return "";
        },
        s.kind);
  }
};

}  // namespace

std::string print_program(const Program& p) { return Printer().run(p); }

ProvenanceMap ProvenanceMap::from_json(const std::string& text) {
  ProvenanceMap m;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("sidecar: ") + e.what());
  }
  if (!j.is_object()) throw Error("sidecar: expected a JSON object");
  auto read = [&](const char* key, std::set<SourcePos>& into) {
    if (!j.contains(key)) return;
    for (const auto& e : j.at(key)) {
      if (!e.contains("file") || !e.contains("line"))
        throw Error(std::string("sidecar: entries under '") + key + "' need file and line");
      into.insert({e.at("file").get<std::string>(), e.at("line").get<int>()});
    }
  };
  read("left", m.left);
  read("right", m.right);
  return m;
}

ProvenanceMap ProvenanceMap::load(const std::filesystem::path& file) {
  return from_json(SourceUnit::load(file).text);
}

std::string ProvenanceMap::to_json() const {
  nlohmann::json j = {{"left", nlohmann::json::array()}, {"right", nlohmann::json::array()}};
  for (const auto& p : left) j["left"].push_back({{"file", p.file}, {"line", p.line}});
  for (const auto& p : right) j["right"].push_back({{"file", p.file}, {"line", p.line}});
  return j.dump();
}

namespace {

bool same_file(const std::string& a, const std::string& b) {
  if (a == b) return true;
  return std::filesystem::path(a).filename() == std::filesystem::path(b).filename();
}

}  // namespace

Program apply_sidecar(const Program& p, const ProvenanceMap& m) {
  for (const auto& l : m.left)
    for (const auto& r : m.right)
      if (l.line == r.line && same_file(l.file, r.file))
        throw Error("line " + l.str() + " mapped both LEFT and RIGHT");

  std::set<SourcePos> matched_left, matched_right;
  auto lookup = [](const std::set<SourcePos>& set, const SourcePos& pos,
                   std::set<SourcePos>& matched) {
    for (const auto& e : set)
      if (e.line == pos.line && same_file(e.file, pos.file)) {
        matched.insert(e);
        return true;
      }
    return false;
  };

  ProgramData data = p.data();
  for_each_body_mut(data, [&](MethodDef& method) {
    for_each_stmt_mut(method.body, [&](Stmt& s) {
      if (s.as<If>() || s.as<While>()) return;
      bool l = lookup(m.left, s.pos, matched_left);
      bool r = lookup(m.right, s.pos, matched_right);
      Provenance mapped = l ? Provenance::Left : r ? Provenance::Right : Provenance::Base;
      if (s.provenance != Provenance::Base && s.provenance != mapped)
        throw Error("inline marker at " + s.pos.str() + " disagrees with sidecar (" +
                    std::string(to_string(s.provenance)) + " vs " +
                    std::string(to_string(mapped)) + ")");
      s.provenance = mapped;
    });
  });

  for (const auto& e : m.left)
    if (!matched_left.contains(e)) throw Error("no statement at line " + e.str());
  for (const auto& e : m.right)
    if (!matched_right.contains(e)) throw Error("no statement at line " + e.str());
  return Program(std::move(data));
}

std::vector<const MethodDef*> entry_candidates(const Program& p) {
  std::vector<const MethodDef*> out;
  for (const auto& c : p.classes()) {
    auto consider = [&](const MethodDef& m) {
      bool left = false, right = false;
      for_each_stmt(m.body, [&](const Stmt& s) {
        left |= s.provenance == Provenance::Left;
        right |= s.provenance == Provenance::Right;
      });
      if (left && right) out.push_back(&m);
    };
    for (const auto& m : c.constructors) consider(m);
    for (const auto& m : c.methods) consider(m);
  }
  return out;
}

const MethodDef& find_entry(const Program& p, const std::string& qualified) {
  auto dot = qualified.rfind('.');
  if (dot == std::string::npos) throw Error("entry must be Class.method: " + qualified);
  std::string cls = qualified.substr(0, dot);
  std::string name = qualified.substr(dot + 1);
  if (name == "ctor") name = std::string(kCtorName);
  const ClassDef* c = p.find_class(cls);
  if (!c) throw Error("entry not found: unknown class " + cls);
  const MethodDef* found = nullptr;
  const auto& pool = name == kCtorName ? c->constructors : c->methods;
  for (const auto& m : pool) {
    if (m.name != name) continue;
    if (found) throw Error("entry " + qualified + " is ambiguous");
    found = &m;
  }
  if (!found) throw Error("entry not found: " + qualified);
  return *found;
}

}  // namespace semconf
