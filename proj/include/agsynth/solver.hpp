#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agsynth/encoder.hpp"

namespace agsynth {

struct SolverConfig {
  std::string executable;
  std::vector<std::string> args;
  double timeout_seconds = 600.0;
  std::string workdir = ".";
  bool keep_artifacts = false;
  bool via_stdin = false;  // default: pass a temp file path as the last argument
  std::string artifact_stem;  // <problem>.<mode>.b<bound>

  SolverConfig() = default;
};

enum class SolveStatus { Sat, Unsat, Unknown, Timeout, Crashed };

std::string status_name(SolveStatus s);

struct SolverResult {
  SolveStatus status = SolveStatus::Unknown;
  std::string model_text;   // raw solver output after "sat"
  std::string diagnostics;  // stderr / crash information
  double seconds = 0.0;
};

// Resolves the solver executable: $AGSYNTH_SOLVER, then the configured path,
// then "z3" on PATH, then the bundled wasm shim next to the binary.
std::string find_solver_executable(const std::string& configured);

// Runs the script through the external solver process; enforces the timeout
// by killing the process. The status is parsed from the first sat / unsat /
// unknown token of standard output.
SolverResult solve(const std::string& script, const SolverConfig& cfg);

// Reads the hole tables out of a sat result's get-value answers.
StrategyTables extract_tables(const SolverResult& r, const ConstraintSet& c);

// Brute-force baseline: enumerates all interpretations of the hole symbols;
// the annotation constraints are decided by reachable-rejecting-cycle
// analysis on each instance's guarded product graph. Agrees with an external
// solver on sat/unsat. `budget_bits` caps the total table bits.
SolverResult enumerative_check_sat(const ConstraintSet& c, int budget_bits = 20);

}  // namespace agsynth
