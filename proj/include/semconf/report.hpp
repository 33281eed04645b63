#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "semconf/engine.hpp"

namespace semconf {

// Header line plus one flow block per write:
//
//   Interference in class Text, method void generateReport(), execution of
//   line 8 overrides 10, assigning to variable this.<ReportSimple: int fixes>
//   Caused by line 8 flow:
//     at Text.generateReport():8
//     at ReportSimple.countDupWords():4
//   And line 10 flow:
//     ...
//
// The header names the earlier write's entry line first. `p` supplies the
// entry method's signature.
std::string render_text(const ConflictReport& c, const Program& p);

struct OutcomeRecord {
  struct Conflict {
    std::string element;
    int over_line = 0;   // entry line leading to the overriding (later) write
    int under_line = 0;  // entry line leading to the overridden (earlier) write
    auto operator<=>(const Conflict&) const = default;
  };
  struct Miss {
    std::string file;
    int line = 0;
    std::string reason;
    bool on_conflict_path = false;
    auto operator<=>(const Miss&) const = default;
  };

  std::string unit;
  Mode mode = Mode::NoPA;
  Verdict verdict = Verdict::False;
  std::vector<Conflict> conflicts;
  std::vector<Miss> missrefs;
  std::uint64_t visited = 0;
  std::uint64_t paths = 0;
  double elapsed_ms = 0;

  bool operator==(const OutcomeRecord&) const = default;
};

OutcomeRecord make_record(const std::string& unit, Mode mode, const AnalysisOutcome& o);

// One JSON object per line, keys in a fixed order.
std::string emit_records(const std::vector<OutcomeRecord>& records);
void emit_records(const std::vector<OutcomeRecord>& records, std::ostream& out);
std::vector<OutcomeRecord> parse_records(const std::string& text);

}  // namespace semconf
