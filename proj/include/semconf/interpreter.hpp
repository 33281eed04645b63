#pragma once

// Concrete small-step interpreter used as a test oracle for the static
// analyses: it records which allocation sites locals actually point to,
// which methods virtual calls actually reach, and the ordered writes.

#include <cstdint>
#include <string>
#include <vector>

#include "semconf/engine.hpp"

namespace semconf {

struct Trace {
  struct Binding {
    MethodId method;
    std::string local;
    std::size_t site = 0;  // allocation site id, as numbered by collect_alloc_sites
    auto operator<=>(const Binding&) const = default;
  };
  struct Dispatch {
    SourcePos site;
    MethodId target;
    auto operator<=>(const Dispatch&) const = default;
  };

  std::vector<Binding> bindings;
  std::vector<Dispatch> dispatches;  // virtual calls only
  std::vector<WriteEvent> writes;
  std::uint64_t steps = 0;
  bool truncated = false;  // step limit or call depth reached
  bool aborted = false;    // runtime fault: null receiver, bad index, missing method
  std::string fault;
};

// Runs `main` from an empty heap. Write events use the detector's element
// keys and provenance inheritance, so a trace is comparable to an analysis
// path. Throws Error on `mkref`.
Trace interpret(const Program& p, const MethodDef& main, std::uint64_t step_limit);

}  // namespace semconf
