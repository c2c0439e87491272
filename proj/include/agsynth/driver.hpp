#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "agsynth/checker.hpp"
#include "agsynth/encoder.hpp"
#include "agsynth/solver.hpp"

namespace agsynth {

struct RunConfig {
  Mode mode = Mode::Ags;
  int max_memory = 3;
  std::optional<std::pair<uint64_t, uint64_t>> opt_range;  // [min, max]
  bool opt_binary_search = false;
  SolverConfig solver;
  EncodeOptions encode;
  bool portfolio = false;  // solve consecutive bounds concurrently
  std::ostream* log = nullptr;
};

struct PhaseTiming {
  std::string phase;
  double seconds;
};

struct Solution {
  StrategyTables tables;
  // Per hole, one minimized expression per output bit (first output bit
  // first); raw tables are rendered when a hole observes more than 8 bits.
  std::vector<std::pair<std::string, std::vector<std::string>>> exprs;
  int bound = 0;
  std::optional<uint64_t> opt_value;  // smallest bound shown realizable
  std::optional<uint64_t> cost;      // evaluated cost of the tables
  std::vector<PhaseTiming> timings;
  AgsReport report;                   // post-hoc verification (must hold)
};

struct SynthesisOutcome {
  enum class Kind { Solved, UnrealizableAtBound, Inconclusive } kind;
  std::optional<Solution> solution;
  int bounds_tried = 0;
  std::vector<std::string> notes;  // one status line per bound
};

// The semi-decision loop: for b = 0,1,...,max_memory encode the mode, solve,
// extract, verify (a failed verification is an internal error), optionally
// optimize. Solver unknown/timeout marks the bound inconclusive and the loop
// continues.
SynthesisOutcome synthesize(const SynthesisProblem& p, const RunConfig& cfg);

// Cost-descent: repeatedly re-solves with cost < opt for decreasing opt
// until unsat (or the range floor) and returns the last sat solution.
Solution optimize(const SynthesisProblem& p, const GroundModel& m,
                  const RunConfig& cfg, Solution start);

// Minimized sum-of-products strings for every hole of the model.
std::vector<std::pair<std::string, std::vector<std::string>>> table_expressions(
    const GroundModel& m, const StrategyTables& t);

std::string solution_to_json(const SynthesisProblem& p, const GroundModel& m,
                             const Solution& sol);

}  // namespace agsynth
