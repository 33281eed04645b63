#pragma once

// Andersen-style points-to analysis: inclusion-based, flow- and
// context-insensitive, field-sensitive, with one smashed element slot per
// array allocation site. Virtual call edges are discovered on the fly from
// receiver points-to sets.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semconf/callgraph.hpp"
#include "semconf/mir.hpp"

namespace semconf {

struct AllocSite {
  enum class Kind : std::uint8_t { Object, Array };

  std::size_t id = 0;
  SourcePos pos;
  std::string cls;  // class, or element type for arrays
  Kind kind = Kind::Object;
  MethodId method;
};

// One site per `new` / `newarr` statement, ids dense in declaration order.
// `mkref` creates no site.
std::vector<AllocSite> collect_alloc_sites(const Program& p);

using SiteSet = std::set<std::size_t>;

struct PointerVar {
  enum class Kind : std::uint8_t { Local, Field, ArraySlot, Static, Return };

  Kind kind = Kind::Local;
  MethodId method;   // Local, Return
  std::string name;  // local name, field name
  std::size_t site = 0;  // Field, ArraySlot
  std::string cls;   // Static: declaring class

  static PointerVar local(MethodId m, std::string n) {
    return {Kind::Local, std::move(m), std::move(n), 0, {}};
  }
  static PointerVar field(std::size_t site, std::string f) {
    return {Kind::Field, {}, std::move(f), site, {}};
  }
  static PointerVar array_slot(std::size_t site) { return {Kind::ArraySlot, {}, {}, site, {}}; }
  static PointerVar static_field(std::string cls, std::string f) {
    return {Kind::Static, {}, std::move(f), 0, std::move(cls)};
  }
  static PointerVar returned(MethodId m) { return {Kind::Return, std::move(m), {}, 0, {}}; }

  std::string str() const;
  auto operator<=>(const PointerVar&) const = default;
};

struct PointsToResult {
  std::vector<AllocSite> sites;
  std::map<PointerVar, SiteSet> pts;
  CallGraph callgraph;  // builder PTS, rooted at the entry points
  std::set<MethodId> entry_points;
  std::uint64_t work = 0;  // constraint applications, for the deterministic clock
  int rounds = 0;

  const SiteSet& of(const PointerVar& v) const;
  bool reachable(const MethodId& m) const { return callgraph.nodes.contains(m); }

  // `variable<TAB>{ids}` lines for non-empty sets, then a `#MISS` section.
  std::string dump() const;
};

// Static `main` methods if any exist; otherwise every public method and
// constructor. Throws Error for a program without methods.
std::set<MethodId> pa_entry_points(const Program& p);

PointsToResult solve(const Program& p, const std::set<MethodId>& entries);

// One propagation round over every reachable method. Returns true if any
// set, edge or reachable method changed. A solved result returns false.
bool propagate_round(const Program& p, PointsToResult& r);

// A pointer expression: a local, or a field / array element through a local.
struct PointerExpr {
  MethodId method;
  std::string base;
  std::optional<std::string> field;
  bool array_element = false;
};

struct PtsLookup {
  bool miss = true;  // empty or never constrained
  SiteSet sites;
};

// Throws Error if the method or local does not occur in the program.
PtsLookup pts_of(const PointsToResult& r, const Program& p, const PointerExpr& e);

// The call graph computed by `solve`; receivers with empty sets show up as
// unresolved sites with no edges.
CallGraph build_pa_graph(const PointsToResult& r);

// Names of every local mentioned in a method, `this` included for instance methods.
std::set<std::string> locals_of(const MethodDef& m);

}  // namespace semconf
