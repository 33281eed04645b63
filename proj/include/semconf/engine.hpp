#pragma once

// Override Assignment detection. A conflict is a LEFT (or RIGHT) write to a
// state element followed on some execution path by a write from the other
// side to the same element, with no BASE write to it in between.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semconf/callgraph.hpp"
#include "semconf/mir.hpp"
#include "semconf/pointsto.hpp"

namespace semconf {

enum class Mode : std::uint8_t { NoPA, PA, Hybrid };
std::string_view to_string(Mode m);  // "nopa" | "pa" | "hybrid"
Mode parse_mode(std::string_view s);

enum class Verdict : std::uint8_t { True, False, Timeout };
std::string_view to_string(Verdict v);  // "true" | "false" | "timeout"
Verdict parse_verdict(std::string_view s);

struct AnalysisBudget {
  int depth_limit = 5;
  std::uint64_t fuel = 500000;  // statement visits
  double wall_clock_seconds = 300;
  std::uint64_t path_cap = 4096;
  bool use_wall_clock = true;
  bool stop_at_first_conflict = false;
};

enum class ElementKind : std::uint8_t { LV, IFR, AR, SFR };

struct StateElementKey {
  ElementKind kind = ElementKind::LV;
  std::string local;       // LV: the local; IFR/AR: the base local
  std::optional<std::string> base_type;  // IFR/AR: static type of the base, if known
  std::string field;       // IFR/SFR
  std::string declaring;   // IFR/SFR: declaring class ("?" if unknown)
  std::string field_type;  // IFR/SFR: declared type ("?" if unknown)
  Operand index;           // AR

  // LV `x`, IFR `base.<C: T f>`, AR `base[i]`, SFR `<C: T f>`.
  std::string str() const;
};

// Builds element keys the way the detector does; shared with the oracle interpreter.
class ElementKeys {
public:
  ElementKeys(const Program& p, const StaticTypes& types) : program_(p), types_(types) {}

  StateElementKey local(const std::string& name) const;
  StateElementKey field(const MethodId& m, const std::string& base, const std::string& field) const;
  StateElementKey array(const MethodId& m, const std::string& base, const Operand& index) const;
  StateElementKey static_field(const std::string& cls, const std::string& field) const;

private:
  const Program& program_;
  const StaticTypes& types_;
};

struct WriteEvent {
  StateElementKey element;
  SourcePos position;
  Provenance provenance = Provenance::Base;
  MethodId method;
  MethodKind enclosing_kind = MethodKind::Method;
  std::vector<SourcePos> call_path;  // call sites from the entry, outermost first
  std::vector<MethodId> frames;      // entry, then each callee; back() == method

  int top_line() const { return call_path.empty() ? position.line : call_path.front().line; }
};

struct MissRef {
  enum class Reason : std::uint8_t { EmptyPts, UnresolvedCall };

  SourcePos position;
  std::string expression;
  Reason reason = Reason::EmptyPts;
  bool on_conflict_path = false;

  auto operator<=>(const MissRef&) const = default;
};
std::string_view to_string(MissRef::Reason r);  // "empty-pts" | "unresolved-call"
MissRef::Reason parse_reason(std::string_view s);

struct ConflictReport {
  std::string element;
  WriteEvent overriding;  // the later write
  WriteEvent overridden;  // the earlier write
  MethodId entry;
};

struct AnalysisStats {
  std::uint64_t visited = 0;
  std::uint64_t paths = 0;
  std::uint64_t solver_work = 0;
  double elapsed_ms = 0;
};

struct AnalysisOutcome {
  Verdict verdict = Verdict::False;
  std::vector<ConflictReport> conflicts;
  std::vector<MissRef> miss_refs;
  AnalysisStats stats;
};

// Everything a detection run reads: the program, its CHA resolver, and for
// PA/hybrid the points-to result. Immutable once built; shareable.
class AnalysisContext {
public:
  AnalysisContext(const Program& p, Mode mode);

  const Program& program() const { return program_; }
  const ChaResolver& cha() const { return cha_; }
  const PointsToResult* pts() const { return pts_ ? &*pts_ : nullptr; }
  Mode mode() const { return mode_; }

private:
  const Program& program_;
  Mode mode_;
  ChaResolver cha_;
  std::optional<PointsToResult> pts_;
};

enum class Match : std::uint8_t { NoMatch, Match };

struct Comparison {
  Match result = Match::NoMatch;
  bool fell_back = false;  // PA could not decide and the name/type rule answered
};

// Collects MissRefs recorded while comparing or resolving.
using MissSink = std::vector<MissRef>;

Match compare_local(const WriteEvent& a, const WriteEvent& b);
Comparison compare_instance_field(const WriteEvent& a, const WriteEvent& b, Mode mode,
                                  const AnalysisContext& ctx, MissSink* sink = nullptr);
Comparison compare_array(const WriteEvent& a, const WriteEvent& b, Mode mode,
                         const AnalysisContext& ctx, MissSink* sink = nullptr);
Match compare_static_field(const WriteEvent& a, const WriteEvent& b);
Match same_element(const WriteEvent& a, const WriteEvent& b, Mode mode, const AnalysisContext& ctx,
                   MissSink* sink = nullptr);

struct CallResolution {
  std::vector<MethodId> targets;
  bool missed = false;  // PA could not resolve the receiver
};

// `enclosing` is the method holding the call statement.
CallResolution resolve_call(const Stmt& site, const MethodId& enclosing, Mode mode,
                            const AnalysisContext& ctx, MissSink* sink = nullptr);

struct EnumerationResult {
  AnalysisStats stats;
  bool exhausted = false;
};

// Depth-first enumeration of every path from `entry`, yielding each path's
// ordered write events.
EnumerationResult enumerate_write_paths(const AnalysisContext& ctx, const MethodDef& entry,
                                        const AnalysisBudget& budget,
                                        const std::function<void(const std::vector<WriteEvent>&)>& sink);

// Conflicts on one complete path, by most-recent-prior-write matching.
std::vector<ConflictReport> scan_path(const std::vector<WriteEvent>& path, const MethodId& entry,
                                      const AnalysisContext& ctx, MissSink* sink = nullptr);

AnalysisOutcome detect(const AnalysisContext& ctx, const MethodDef& entry, const AnalysisBudget& budget);
// Builds the context itself; its cost is included in the elapsed time.
AnalysisOutcome detect(const Program& p, const MethodDef& entry, Mode mode, const AnalysisBudget& budget);
AnalysisOutcome detect(const Program& p, const std::string& entry, Mode mode, const AnalysisBudget& budget);

// When OA_SEED is set, elapsed time comes from a work counter instead of the
// clock, so outputs are byte-stable.
bool deterministic_clock();

}  // namespace semconf
