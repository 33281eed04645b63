#include <gtest/gtest.h>

#include <algorithm>

#include "properties.hpp"
#include "semconf/generator.hpp"
#include "semconf/interpreter.hpp"
#include "semconf/pointsto.hpp"
#include "test_util.hpp"

using namespace semconf;

namespace {

const MethodDef& main_of(const Program& p) { return find_entry(p, "Main.main"); }

TEST(Interpreter, CopyBindsTheSameSite) {
  auto p = testutil::parse(R"(class A {
}
class Main {
  public static method main() {
    x = new A();
    y = x;
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  MethodId m{"Main", "main", 0};
  EXPECT_NE(std::find(t.bindings.begin(), t.bindings.end(), Trace::Binding{m, "x", 0}), t.bindings.end());
  EXPECT_NE(std::find(t.bindings.begin(), t.bindings.end(), Trace::Binding{m, "y", 0}), t.bindings.end());
  EXPECT_FALSE(t.truncated);
  EXPECT_FALSE(t.aborted);
}

TEST(Interpreter, ReportWritesInProgramOrder) {
  auto p = testutil::load_corpus("fig1_simple");
  Trace t = interpret(p, main_of(p), 1000);
  std::vector<int> fixes;
  for (const auto& w : t.writes)
    if (w.element.kind == ElementKind::IFR && w.element.field == "fixes") {
      EXPECT_EQ(w.position.file, "ReportSimple.mir");
      fixes.push_back(w.position.line);
    }
  EXPECT_EQ(fixes, (std::vector<int>{4, 9}));
}

TEST(Interpreter, CalleeWritesInheritCallProvenance) {
  auto p = testutil::load_corpus("fig1_simple");
  Trace t = interpret(p, main_of(p), 1000);
  for (const auto& w : t.writes) {
    if (w.position == SourcePos{"ReportSimple.mir", 4}) {
      EXPECT_EQ(w.provenance, Provenance::Left);
      EXPECT_EQ(w.call_path.back(), (SourcePos{"Text.mir", 8}));
    }
    if (w.position == SourcePos{"ReportSimple.mir", 9}) EXPECT_EQ(w.provenance, Provenance::Right);
    if (w.position.file == "Main.mir") EXPECT_EQ(w.provenance, Provenance::Base);
  }
}

TEST(Interpreter, FalseLoopConditionSkipsBody) {
  auto p = testutil::parse(R"(class Main {
  public static method main() {
    c = 0;
    while c {
      x = 1;
    }
    y = 2;
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  for (const auto& w : t.writes) EXPECT_NE(w.element.local, "x");
  ASSERT_EQ(t.writes.size(), 2u);
  EXPECT_EQ(t.writes.back().element.local, "y");
}

TEST(Interpreter, ConditionSelectsBranch) {
  auto p = testutil::parse(R"(class Main {
  public static method main() {
    c = 1;
    if c {
      x = 1;
    } else {
      y = 1;
    }
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  ASSERT_EQ(t.writes.size(), 2u);
  EXPECT_EQ(t.writes[1].element.local, "x");
}

TEST(Interpreter, ReflectiveInstantiationIsRejected) {
  auto p = testutil::load_corpus("reflection");
  try {
    interpret(p, main_of(p), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "oracle cannot execute reflective instantiation");
  }
}

TEST(Interpreter, StepLimitTruncates) {
  auto p = testutil::parse(R"(class Main {
  public static method main() {
    c = 1;
    while c {
      x = op(c);
    }
  }
}
)");
  Trace t = interpret(p, main_of(p), 50);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.steps, 51u);
}

TEST(Interpreter, NullReceiverAborts) {
  auto p = testutil::parse(R"(class A {
  public method m() {
  }
}
class Main {
  field a: A;
  public static method main() {
    o = new Main();
    x = o.a;
    call x.m();
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  EXPECT_TRUE(t.aborted);
  EXPECT_TRUE(t.dispatches.empty());
}

TEST(Interpreter, DispatchFollowsDynamicClass) {
  auto p = testutil::parse(R"(class A {
  public method m() {
    v = 1;
  }
}
class B extends A {
  public method m() {
    v = 2;
  }
}
class Main {
  public static method main() {
    x = new B();
    call x.m();
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  ASSERT_EQ(t.dispatches.size(), 1u);
  EXPECT_EQ(t.dispatches[0].target, (MethodId{"B", "m", 0}));
  EXPECT_EQ(t.dispatches[0].site, (SourcePos{"T.mir", 14}));
}

TEST(Interpreter, ArraysAndStatics) {
  auto p = testutil::parse(R"(class S {
  field static g: A;
}
class A {
}
class Main {
  public static method main() {
    arr = newarr A 2;
    a = new A();
    arr[1] = a;
    b = arr[1];
    S::g = b;
    c = S::g;
    d = arr[5];
  }
}
)");
  Trace t = interpret(p, main_of(p), 100);
  MethodId m{"Main", "main", 0};
  EXPECT_NE(std::find(t.bindings.begin(), t.bindings.end(), Trace::Binding{m, "c", 1}), t.bindings.end());
  EXPECT_TRUE(t.aborted);
  EXPECT_EQ(t.fault, "array index out of range");
}

TEST(Generator, SameSeedSameProgram) {
  auto a = generate_program(42);
  auto b = generate_program(42);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.program, b.program);
  EXPECT_NE(generate_program(43).source, a.source);
}

TEST(Generator, ProgramsAreValidAndWithinBounds) {
  GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto g = generate_program(seed, cfg);
    EXPECT_TRUE(validate_program(g.program).empty()) << g.source;
    int classes = 0;
    for (const auto& c : g.program.classes()) {
      if (c.name == "Main") continue;
      ++classes;
      EXPECT_LE(static_cast<int>(c.methods.size()), cfg.max_methods) << g.source;
    }
    EXPECT_LE(classes, cfg.max_classes);
    EXPECT_LE(static_cast<int>(g.program.interfaces().size()), cfg.max_interfaces);
    EXPECT_EQ(g.source.find("mkref"), std::string::npos);
    EXPECT_NO_THROW(main_of(g.program));
  }
}

TEST(Generator, StraightLineShape) {
  GeneratorConfig cfg;
  cfg.straight_line = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto g = generate_program(seed, cfg);
    for (const char* banned : {"if ", "while ", "extends", "implements", "interface"})
      EXPECT_EQ(g.source.find(banned), std::string::npos) << g.source;
  }
}

TEST(Generator, MostStraightLineProgramsRunToCompletion) {
  GeneratorConfig cfg;
  cfg.straight_line = true;
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto g = generate_program(seed, cfg);
    Trace t = interpret(g.program, main_of(g.program), 100000);
    clean += !t.aborted && !t.truncated;
  }
  EXPECT_GE(clean, 90);
}

TEST(Generator, BaseSeedFallback) {
  if (std::getenv("OA_SEED")) GTEST_SKIP();
  EXPECT_EQ(base_seed(5), 5u);
}

// ---- properties over generated programs

TEST(Properties, PointsToAndChaCoverObservedBehaviour) {
  auto c = props::soundness(base_seed(), 100);
  EXPECT_EQ(c.programs, 100);
  EXPECT_EQ(c.binding_violations, 0);
  EXPECT_EQ(c.cha_dispatch_violations, 0);
  EXPECT_EQ(c.pts_dispatch_violations, 0);
  EXPECT_EQ(c.pts_not_in_cha, 0);
  for (const auto& d : c.details) ADD_FAILURE() << d;
  EXPECT_GT(c.bindings, 500u);
  EXPECT_GT(c.dispatches, 50u);
}

TEST(Properties, DetectorAgreesWithConcreteTraces) {
  auto c = props::coherence(base_seed(), 100);
  EXPECT_EQ(c.verdict_mismatches, 0);
  EXPECT_EQ(c.path_mismatches, 0);
  for (const auto& d : c.details) ADD_FAILURE() << d;
  EXPECT_LE(c.skipped, 10);
  EXPECT_GT(c.with_conflict, 10);
  EXPECT_LT(c.with_conflict, c.programs - c.skipped);
}

TEST(Properties, PointsToIsDeterministic) {
  for (std::uint64_t seed = base_seed(); seed < base_seed() + 20; ++seed) {
    auto g = generate_program(seed);
    auto a = solve(g.program, pa_entry_points(g.program));
    auto b = solve(g.program, pa_entry_points(g.program));
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(a.callgraph.dump(), b.callgraph.dump());
  }
}

}  // namespace
