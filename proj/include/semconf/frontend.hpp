#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semconf/mir.hpp"

namespace semconf {

struct SourceUnit {
  std::string path;
  std::string text;

  int line_count() const;
  static SourceUnit load(const std::filesystem::path& file, std::string display_path = {});
};

// Syntax or validation failure. `pos` is the first offending location.
class ParseError : public Error {
public:
  ParseError(SourcePos pos, const std::string& message)
      : Error(pos.str() + ": " + message), pos_(std::move(pos)) {}
  const SourcePos& pos() const { return pos_; }

private:
  SourcePos pos_;
};

// Parses and validates. Inline `@L` / `@R` markers set statement provenance.
Program parse_program(const std::vector<SourceUnit>& units);

// Canonical MIR text for `p` (single unit, one statement per line).
std::string print_program(const Program& p);

struct ProvenanceMap {
  std::set<SourcePos> left;
  std::set<SourcePos> right;

  bool empty() const { return left.empty() && right.empty(); }
  static ProvenanceMap from_json(const std::string& text);
  static ProvenanceMap load(const std::filesystem::path& file);
  std::string to_json() const;
};

// Tags statements at mapped lines LEFT/RIGHT, everything else BASE. Inline
// markers must agree with the map. A map file name matches a statement file
// when equal, or when their final path components are equal.
Program apply_sidecar(const Program& p, const ProvenanceMap& m);

// Methods and constructors whose own bodies (nested blocks included, callees
// excluded) hold at least one LEFT and one RIGHT statement, in declaration order.
std::vector<const MethodDef*> entry_candidates(const Program& p);

// Resolves `Class.method` (or `Class.<init>`); ambiguity over arities is an error.
const MethodDef& find_entry(const Program& p, const std::string& qualified);

}  // namespace semconf
