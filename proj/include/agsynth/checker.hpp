#pragma once

#include <string>
#include <vector>

#include "agsynth/encoder.hpp"
#include "agsynth/problem.hpp"

namespace agsynth {

// One step of a counterexample: the global valuation (extended state,
// uncontrollable inputs including the scheduler bit, and the controllable
// inputs as chosen/computed that step).
struct TraceStep {
  Valuation global;
  SignalValuation signals;
};

struct Verdict {
  bool holds = true;
  std::string instance;           // tag of the violated condition
  Formula formula;                // the checked formula
  std::vector<int> refined;
  std::vector<TraceStep> stem;    // present iff !holds
  std::vector<TraceStep> loop;
  bool vacuous = false;           // condition not applicable in this mode
};

struct AgsReport {
  Verdict cond[3];  // (i), (ii), (iii)
  bool all_hold() const {
    return cond[0].holds && cond[1].holds && cond[2].holds;
  }
};

inline constexpr int kDefaultCheckStateBudget = 2000000;

// Explicit-state check that every execution of the composition (refined
// processes driven by their tables, the others fully nondeterministic)
// satisfies `spec`: builds the reachable product with the UCW and looks for
// a cycle through a rejecting state (SCC analysis). On violation the verdict
// carries a lasso with a shortest stem.
Verdict model_check(const GroundModel& m, const StrategyTables& t, const Formula& spec,
                    const std::vector<int>& refined,
                    int state_budget = kDefaultCheckStateBudget);

// The three conditions of the mode (vacuous verdicts where not applicable).
AgsReport check_solution(const GroundModel& m, const StrategyTables& t, Mode mode);

// Enumerates all strategy tables (ascending counter order over the packed
// table bits) whose check_solution holds on every condition. Stops after
// max_results hits. Throws budget_error if the tables exceed budget_bits.
std::vector<StrategyTables> brute_force_synthesize(const GroundModel& m, Mode mode,
                                                   int budget_bits = 20,
                                                   uint64_t max_results = ~uint64_t(0));

// Tables from a packed bit counter (hole declaration order, rows ascending,
// first output bit highest); counter 0 is the all-false table set.
StrategyTables tables_from_counter(const GroundModel& m, uint64_t counter);

// Re-executes a counterexample and confirms it reproduces the recorded
// states and violates the formula (used by tests and the CLI).
bool replay_counterexample(const GroundModel& m, const StrategyTables& t,
                           const Verdict& v);

// Text table: one row per step (scheduler bit, inputs, changed variables).
std::string render_counterexample(const GroundModel& m, const Verdict& v);

}  // namespace agsynth
