#include <gtest/gtest.h>

#include "semconf/mir.hpp"
#include "test_util.hpp"

using namespace semconf;

namespace {

const char* kHierarchy = R"(
interface Report {
  method countDupWords();
}
class ReportSimple implements Report {
  public method countDupWords() {
  }
}
class ReportAdvanced implements Report {
  public method countDupWords() {
  }
}
class Base {
}
class Mid extends Base {
}
class Leaf extends Mid {
}
interface Lonely {
}
)";

ProgramData two_classes() {
  ProgramData d;
  ClassDef a;
  a.name = "A";
  a.pos = {"T.mir", 1};
  ClassDef b;
  b.name = "B";
  b.superclass = "A";
  b.pos = {"T.mir", 2};
  d.classes = {a, b};
  return d;
}

}  // namespace

TEST(Validate, WellFormedProgramHasNoDiagnostics) {
  EXPECT_TRUE(validate_program(Program(two_classes())).empty());
}

TEST(Validate, UnknownSupertype) {
  auto d = two_classes();
  d.classes[1].superclass = "Missing";
  auto diags = validate_program(Program(d));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("unknown supertype"), std::string::npos);
}

TEST(Validate, InheritanceCycleReportedOnce) {
  auto d = two_classes();
  d.classes[0].superclass = "B";
  auto diags = validate_program(Program(d));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("inheritance cycle"), std::string::npos);
}

TEST(Validate, DuplicateStatementPosition) {
  auto d = two_classes();
  MethodDef m;
  m.name = "m";
  m.declaring_class = "A";
  Stmt s;
  s.pos = {"T.mir", 5};
  s.kind = OpaqueOp{"x", {}};
  m.body = {s, s};
  d.classes[0].methods.push_back(m);
  auto diags = validate_program(Program(d));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].pos, (SourcePos{"T.mir", 5}));
}

TEST(Subtype, PaperHierarchy) {
  auto p = testutil::parse(kHierarchy);
  EXPECT_TRUE(subtype_of("ReportSimple", "Report", p));
  EXPECT_TRUE(subtype_of("Report", "Report", p));
  EXPECT_FALSE(subtype_of("ReportSimple", "ReportAdvanced", p));
  EXPECT_TRUE(subtype_of("Leaf", "Base", p));
  EXPECT_FALSE(subtype_of("Base", "Leaf", p));
  EXPECT_THROW(subtype_of("Nope", "Report", p), Error);
}

TEST(Subtype, ReflexiveTransitiveAntisymmetric) {
  auto p = testutil::parse(kHierarchy);
  std::vector<std::string> names;
  for (const auto& c : p.classes()) names.push_back(c.name);
  for (const auto& i : p.interfaces()) names.push_back(i.name);
  for (const auto& a : names) {
    EXPECT_TRUE(subtype_of(a, a, p));
    for (const auto& b : names) {
      if (a != b && subtype_of(a, b, p)) EXPECT_FALSE(subtype_of(b, a, p)) << a << " " << b;
      for (const auto& c : names)
        if (subtype_of(a, b, p) && subtype_of(b, c, p)) EXPECT_TRUE(subtype_of(a, c, p));
    }
  }
}

TEST(Implementers, PaperAndTrivialCases) {
  auto p = testutil::parse(kHierarchy);
  EXPECT_EQ(implementers_of("Report", p), (std::set<std::string>{"ReportAdvanced", "ReportSimple"}));
  EXPECT_EQ(implementers_of("Leaf", p), (std::set<std::string>{"Leaf"}));
  EXPECT_TRUE(implementers_of("Lonely", p).empty());
  EXPECT_THROW(implementers_of("Nope", p), Error);
}

TEST(Implementers, MatchesBruteForce) {
  auto p = testutil::parse(kHierarchy);
  for (const auto& t : p.interfaces()) {
    std::set<std::string> brute;
    for (const auto& c : p.classes())
      if (subtype_of(c.name, t.name, p)) brute.insert(c.name);
    EXPECT_EQ(implementers_of(t.name, p), brute);
  }
}

TEST(Program, DispatchWalksSuperclasses) {
  auto p = testutil::parse(R"(
class C {
  public method m() {
  }
}
class B extends C {
}
class A extends B {
  public method m() {
  }
}
)");
  EXPECT_EQ(p.dispatch("B", "m", 0)->declaring_class, "C");
  EXPECT_EQ(p.dispatch("A", "m", 0)->declaring_class, "A");
  EXPECT_EQ(p.dispatch("A", "m", 1), nullptr);
}

TEST(Program, CopiesKeepWorkingIndex) {
  auto p = testutil::parse(kHierarchy);
  Program q = p;
  Program r = std::move(p);
  EXPECT_NE(q.find_method({"ReportSimple", "countDupWords", 0}), nullptr);
  EXPECT_NE(r.find_method({"ReportSimple", "countDupWords", 0}), nullptr);
}
