#include <gtest/gtest.h>

#include "semconf/callgraph.hpp"
#include "test_util.hpp"

using namespace semconf;

namespace {

const Stmt& first_call(const MethodDef& m) {
  const Stmt* out = nullptr;
  for_each_stmt(m.body, [&](const Stmt& s) {
    if (!out && (s.as<VirtualCall>() || s.as<StaticCall>())) out = &s;
  });
  return *out;
}

std::string implementers(int k) {
  // Root first so its call site keeps its line as implementers are added.
  std::string src = "class Root {\n  public method run() {\n    r = mkref I;\n    call r.m();\n  }\n}\n";
  src += "interface I {\n  method m();\n}\n";
  for (int i = 0; i < k; ++i)
    src += "class C" + std::to_string(i) + " implements I {\n  public method m() {\n  }\n}\n";
  return src;
}

}  // namespace

TEST(Cha, Fig1ResolvesBothImplementers) {
  auto p = testutil::load_corpus("fig1_advanced");
  const auto& root = p.method({"Text", "generateReport", 0});
  auto targets = cha_resolve(first_call(root), root.id(), p);
  EXPECT_EQ(targets, (std::set<MethodId>{{"ReportAdvanced", "countDupWords", 0},
                                         {"ReportSimple", "countDupWords", 0}}));
}

TEST(Cha, Fig1GraphHasFiveNodes) {
  auto p = testutil::load_corpus("fig1_advanced");
  auto g = build_cha_graph(p, p.method({"Text", "generateReport", 0}));
  EXPECT_EQ(g.nodes.size(), 5u);
  EXPECT_EQ(g.edges().size(), 4u);
  EXPECT_EQ(g.builder, GraphBuilder::CHA);
}

TEST(Cha, LeafReceiverResolvesToItsMethod) {
  auto p = testutil::parse(R"(class A {
  public method m() {
  }
}
class B extends A {
  public method m() {
  }
}
class Root {
  public method run() {
    b = new B();
    call b.m();
  }
}
)");
  const auto& root = p.method({"Root", "run", 0});
  EXPECT_EQ(cha_resolve(first_call(root), root.id(), p), (std::set<MethodId>{{"B", "m", 0}}));
}

TEST(Cha, ThreeLevelChainIncludesInheritedDefinition) {
  auto p = testutil::parse(R"(class C {
  public method m() {
  }
}
class B extends C {
}
class A extends B {
  public method m() {
  }
}
class Root {
  public method run() {
    x = mkref C;
    call x.m();
  }
}
)");
  const auto& root = p.method({"Root", "run", 0});
  // Oracle: resolve each concrete class below C by walking its superclass chain by hand.
  std::set<MethodId> oracle = {{"C", "m", 0} /* C itself */, {"C", "m", 0} /* B inherits */, {"A", "m", 0}};
  EXPECT_EQ(cha_resolve(first_call(root), root.id(), p), oracle);
}

TEST(Cha, EmptyRootGivesSingleNode) {
  auto p = testutil::parse("class A {\n  public method m() {\n  }\n}\n");
  auto g = build_cha_graph(p, p.method({"A", "m", 0}));
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(Cha, KImplementersGiveKEdges) {
  for (int k : {1, 3, 7}) {
    auto p = testutil::parse(implementers(k));
    auto g = build_cha_graph(p, p.method({"Root", "run", 0}));
    EXPECT_EQ(g.edges().size(), static_cast<std::size_t>(k));
  }
}

TEST(Cha, UnresolvableNameIsAnError) {
  auto p = testutil::parse("class A {\n  public method m() {\n    x = new A();\n    call x.nothing();\n  }\n}\n");
  const auto& root = p.method({"A", "m", 0});
  try {
    cha_resolve(first_call(root), root.id(), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("T.mir:4"), std::string::npos);
  }
}

TEST(Cha, AddingImplementerNeverRemovesEdges) {
  for (int k = 1; k < 6; ++k) {
    auto small = testutil::parse(implementers(k));
    auto large = testutil::parse(implementers(k + 1));
    auto gs = build_cha_graph(small, small.method({"Root", "run", 0}));
    auto gl = build_cha_graph(large, large.method({"Root", "run", 0}));
    for (const auto& e : gs.edges()) EXPECT_TRUE(gl.edges().contains(e));
  }
}

TEST(Cha, DumpIsDeterministic) {
  auto p1 = testutil::load_corpus("fig1_advanced");
  auto p2 = testutil::load_corpus("fig1_advanced");
  auto d1 = build_cha_graph(p1, p1.method({"Text", "generateReport", 0})).dump();
  auto d2 = build_cha_graph(p2, p2.method({"Text", "generateReport", 0})).dump();
  EXPECT_EQ(d1, d2);
  EXPECT_NE(d1.find("Text.generateReport\tText.mir:8\tReportSimple.countDupWords"), std::string::npos);
}

TEST(StaticTypes, JoinAndFlowInsensitivity) {
  auto p = testutil::parse(R"(interface I {
}
class A implements I {
}
class B implements I {
}
class Root {
  public method run(c) {
    x = new A();
    if c {
      x = new B();
    }
    y = new A();
    z = op(y);
  }
}
)");
  StaticTypes t(p);
  MethodId run{"Root", "run", 1};
  EXPECT_EQ(t.local_type(run, "x"), "I");
  EXPECT_EQ(t.local_type(run, "y"), "A");
  EXPECT_EQ(t.local_type(run, "this"), "Root");
  EXPECT_EQ(t.local_type(run, "c"), std::nullopt);
  EXPECT_EQ(StaticTypes::join(p, "A[]", "B[]"), "I[]");
}

TEST(StaticTypes, ParametersTypedFromCallSites) {
  auto p = testutil::load_corpus("fig1_simple");
  StaticTypes t(p);
  EXPECT_EQ(t.local_type({"Text", "<init>", 1}, "r0"), "ReportSimple");
  EXPECT_EQ(t.local_type({"Text", "generateReport", 0}, "rep"), "Report");
}
