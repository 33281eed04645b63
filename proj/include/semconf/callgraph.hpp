#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semconf/mir.hpp"

namespace semconf {

// Static types for MIR's untyped locals.
//
// A local's type is the join (least common supertype) of everything assigned
// to it anywhere in its method: allocations, `mkref` types, declared field
// types on loads, and for parameters the argument types flowing in from every
// call site that may reach the method. Values with no unique least common
// supertype, or no information at all, have no static type; consumers then
// fall back to every class responding to the method name.
class StaticTypes {
public:
  explicit StaticTypes(const Program& p);

  std::optional<std::string> local_type(const MethodId& m, const std::string& local) const;
  std::optional<std::string> return_type(const MethodId& m) const;

  // Least common supertype, or nullopt when there is no unique one.
  static std::optional<std::string> join(const Program& p, const std::string& a,
                                         const std::string& b);

  int rounds() const { return rounds_; }

private:
  // "" = no information, "*" = conflicting information
  using Lattice = std::string;

  const Program& program_;
  std::map<MethodId, std::map<std::string, Lattice>> locals_;
  std::map<MethodId, std::vector<Lattice>> params_;
  std::map<MethodId, Lattice> returns_;
  int rounds_ = 0;

  Lattice join_lattice(const Lattice& a, const Lattice& b) const;
  bool infer_method(const MethodDef& m);
  Lattice field_type(const Lattice& base, const std::string& field) const;
  std::set<MethodId> call_targets(const Stmt& s, const std::map<std::string, Lattice>& env) const;
  friend class ChaResolver;
};

enum class GraphBuilder { CHA, PTS, Hybrid };

struct CallEdge {
  SourcePos site;
  MethodId caller;
  MethodId target;
  auto operator<=>(const CallEdge&) const = default;
};

class CallGraph {
public:
  GraphBuilder builder = GraphBuilder::CHA;
  std::set<MethodId> nodes;
  std::set<MethodId> roots;
  std::set<SourcePos> unresolved;  // virtual sites with no resolvable receiver

  void add_edge(const SourcePos& site, const MethodId& caller, const MethodId& target);
  const std::set<CallEdge>& edges() const { return edges_; }
  std::vector<MethodId> targets_at(const SourcePos& site) const;
  bool has_edge(const SourcePos& site, const MethodId& target) const;

  // One `caller<TAB>file:line<TAB>target` line per edge, in edge order.
  std::string dump() const;

private:
  std::set<CallEdge> edges_;
  std::map<SourcePos, std::set<MethodId>> by_site_;
};

// Class Hierarchy Analysis resolution over a program's static types.
class ChaResolver {
public:
  explicit ChaResolver(const Program& p) : program_(p), types_(p) {}

  const Program& program() const { return program_; }
  const StaticTypes& types() const { return types_; }

  // Targets of a call-like statement (virtual call, static call, `new`)
  // occurring in `enclosing`. Virtual calls resolve to the matching method
  // of every class below the receiver's static type, inherited definitions
  // included. Throws Error when no class anywhere responds to the name.
  std::set<MethodId> resolve(const Stmt& site, const MethodId& enclosing) const;

private:
  const Program& program_;
  StaticTypes types_;
};

std::set<MethodId> cha_resolve(const Stmt& site, const MethodId& enclosing, const Program& p);

// Closure of CHA resolution over every call site reachable from `root`.
CallGraph build_cha_graph(const ChaResolver& cha, const MethodDef& root);
CallGraph build_cha_graph(const Program& p, const MethodDef& root);

}  // namespace semconf
