#pragma once

// Seeded random MIR programs for property suites.

#include <cstdint>
#include <string>

#include "semconf/mir.hpp"

namespace semconf {

struct GeneratorConfig {
  int max_classes = 4;
  int max_interfaces = 2;
  int max_methods = 3;  // per class
  int max_stmts = 12;   // per method body, nested blocks included
  bool allow_mkref = false;
  // No branches, loops, inheritance or interfaces, and an acyclic call
  // structure, so every program has exactly one execution path.
  bool straight_line = false;
  double marker_rate = 0.2;
};

struct GeneratedProgram {
  std::uint64_t seed = 0;
  std::string file;    // "Gen<seed>.mir"
  std::string source;
  Program program;
};

// Well-typed by construction: every local, field and method signature has a
// fixed type, and stores only receive compatible values. Entry is Main.main.
GeneratedProgram generate_program(std::uint64_t seed, const GeneratorConfig& cfg = {});

// Base seed for property suites: OA_SEED if set, else `fallback`.
std::uint64_t base_seed(std::uint64_t fallback = 20240601);

}  // namespace semconf
