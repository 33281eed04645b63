#include <gtest/gtest.h>

#include "semconf/pointsto.hpp"
#include "test_util.hpp"

using namespace semconf;

namespace {

SiteSet sites_at(const PointsToResult& r, std::initializer_list<int> lines) {
  SiteSet out;
  for (int l : lines)
    for (const auto& s : r.sites)
      if (s.pos.line == l) out.insert(s.id);
  return out;
}

PointsToResult solve_main(const Program& p) { return solve(p, pa_entry_points(p)); }

}  // namespace

TEST(EntryPoints, MainsWhenPresent) {
  auto p = testutil::load_corpus("fig1_simple");
  EXPECT_EQ(pa_entry_points(p), (std::set<MethodId>{{"Main", "main", 0}}));
  auto two = testutil::parse(R"(class A {
  public static method main() {
  }
}
class B {
  public static method main() {
  }
  public method other() {
  }
}
)");
  EXPECT_EQ(pa_entry_points(two), (std::set<MethodId>{{"A", "main", 0}, {"B", "main", 0}}));
}

TEST(EntryPoints, LibraryUsesPublicMethodsAndCtors) {
  auto p = testutil::parse(R"(class L {
  ctor() {
  }
  public method a() {
  }
  public method b() {
  }
  public static method c() {
  }
  private method d() {
  }
  private static method e() {
  }
}
)");
  EXPECT_EQ(pa_entry_points(p), (std::set<MethodId>{{"L", "<init>", 0}, {"L", "a", 0}, {"L", "b", 0}, {"L", "c", 0}}));
  EXPECT_THROW(pa_entry_points(testutil::parse("class A {\n}\n")), Error);
}

TEST(Solve, AllocAndCopy) {
  auto p = testutil::parse(R"(class A {
  public static method main() {
    x = new A();
    y = x;
  }
}
)");
  auto r = solve_main(p);
  MethodId m{"A", "main", 0};
  EXPECT_EQ(r.of(PointerVar::local(m, "y")), sites_at(r, {3}));
  EXPECT_EQ(pts_of(r, p, {m, "x"}).sites, sites_at(r, {3}));
}

TEST(Solve, StoreLoadChain) {
  auto p = testutil::parse(R"(class A {
  field f: B;
  public static method main() {
    x = new A();
    y = new B();
    x.f = y;
    z = x.f;
  }
}
class B {
}
)");
  auto r = solve_main(p);
  MethodId m{"A", "main", 0};
  // Hand closure: alloc gives x:{4}, y:{5}; store gives site4.f:{5}; load gives z:{5}.
  EXPECT_EQ(pts_of(r, p, {m, "z"}).sites, sites_at(r, {5}));
  EXPECT_EQ(pts_of(r, p, {m, "x", std::string("f")}).sites, sites_at(r, {5}));
  EXPECT_FALSE(pts_of(r, p, {m, "z"}).miss);
}

TEST(Solve, MkrefIsMiss) {
  auto p = testutil::load_corpus("reflection");
  auto r = solve_main(p);
  EXPECT_TRUE(pts_of(r, p, {{"Main", "main", 0}, "r"}).miss);
  EXPECT_TRUE(pts_of(r, p, {{"Text", "generateReport", 0}, "rep"}).miss);
  EXPECT_EQ(r.sites.size(), 1u);  // only `new Text`
  EXPECT_THROW(pts_of(r, p, {{"Main", "main", 0}, "nothing"}), Error);
  EXPECT_THROW(pts_of(r, p, {{"Main", "absent", 0}, "r"}), Error);
}

TEST(Solve, Fig1WiringSelectsReportSimple) {
  auto p = testutil::load_corpus("fig1_simple");
  auto r = solve_main(p);
  auto rep = pts_of(r, p, {{"Text", "generateReport", 0}, "rep"});
  ASSERT_EQ(rep.sites.size(), 1u);
  EXPECT_EQ(r.sites[*rep.sites.begin()].cls, "ReportSimple");
  auto g = build_pa_graph(r);
  EXPECT_TRUE(g.nodes.contains({"ReportSimple", "countDupWords", 0}));
  EXPECT_EQ(g.builder, GraphBuilder::PTS);
}

TEST(Solve, Fig1AdvancedExcludesReportSimple) {
  auto p = testutil::load_corpus("fig1_advanced");
  auto g = build_pa_graph(solve_main(p));
  EXPECT_TRUE(g.nodes.contains({"ReportAdvanced", "countDupWords", 0}));
  EXPECT_FALSE(g.nodes.contains({"ReportSimple", "countDupWords", 0}));
  EXPECT_FALSE(g.nodes.contains({"ReportSimple", "countDupWhiteSpace", 0}));
}

TEST(Solve, MkrefReceiverGivesUnresolvedSite) {
  auto p = testutil::parse(R"(interface I {
  method m();
}
class A implements I {
  public method m() {
  }
}
class Main {
  public static method main() {
    h = mkref I;
    call h.m();
  }
}
)");
  auto g = build_pa_graph(solve_main(p));
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.unresolved, (std::set<SourcePos>{{"T.mir", 11}}));
}

TEST(Solve, StaticCallSingleEdge) {
  auto p = testutil::parse(R"(class A {
  public static method main() {
    call A::helper();
  }
  public static method helper() {
  }
}
)");
  auto g = build_pa_graph(solve_main(p));
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges().begin()->target, (MethodId{"A", "helper", 0}));
}

TEST(Solve, ReturnsParamsArraysStatics) {
  auto q = testutil::parse(R"(class A {
  field static g: A;
  public static method main() {
    a = new A();
    b = A::id(a);
    arr = newarr A 3;
    arr[0] = b;
    c = arr[1];
    A::g = c;
    d = A::g;
  }
  public static method id(p) {
    return p;
  }
}
)");
  auto r = solve_main(q);
  MethodId m{"A", "main", 0};
  EXPECT_EQ(pts_of(r, q, {m, "d"}).sites, sites_at(r, {4}));
  EXPECT_EQ(pts_of(r, q, {m, "arr", std::nullopt, true}).sites, sites_at(r, {4}));
  EXPECT_EQ(r.of(PointerVar::static_field("A", "g")), sites_at(r, {4}));
}

TEST(Solve, FixpointAfterSolve) {
  for (const char* id : {"fig1_simple", "fig1_advanced", "reflection"}) {
    auto p = testutil::load_corpus(id);
    auto r = solve_main(p);
    auto before = r.pts;
    auto edges = r.callgraph.edges();
    EXPECT_FALSE(propagate_round(p, r)) << id;
    EXPECT_EQ(before, r.pts);
    EXPECT_EQ(edges, r.callgraph.edges());
  }
}

TEST(Solve, DumpHasMissSection) {
  auto p = testutil::load_corpus("reflection");
  auto d = solve_main(p).dump();
  EXPECT_NE(d.find("#MISS\nText.mir:8\nText.mir:10\n"), std::string::npos) << d;
}
