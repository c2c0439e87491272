#pragma once

#include <string>
#include <vector>

#include "agsynth/problem.hpp"
#include "agsynth/term.hpp"
#include "agsynth/ucw.hpp"

namespace agsynth {

enum class Mode { Cooperative, Competitive, Ags };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& s);

// One grounded bounded-synthesis sub-instance: a spec automaton over the
// extended states of the refined processes, with the annotation constraints
// represented as guarded product edges. The annotation is split into a
// reachability flag (reach!k) and a bounded-natural rank (rank!k).
struct EdgeConstraint {
  int q = 0;
  uint64_t x = 0;
  int q2 = 0;
  uint64_t x2 = 0;
  bool strict = false;        // target automaton state is rejecting
  bool rank_tracked = true;   // rank comparison emitted for this edge
  Term guard;                 // over hole applications; null means true
};

struct InstanceEncoding {
  int index = 0;              // 1-based instance number
  std::string tag;            // "coop", "comp1", "ags_i", ...
  Formula formula;
  Ucw automaton;
  std::vector<int> refined;
  DomainPtr ext;                       // extended states of this instance
  std::vector<uint64_t> reachable;     // over-approx reachable ext valuations
  int initial_q = 0;
  uint64_t initial_x = 0;
  uint64_t rank_bound = 0;             // |Q| * |V(ext)| + 1
  int rank_width = 1;
  int q_width = 1;
  int x_width = 1;
  std::vector<EdgeConstraint> edges;
};

struct ConstraintSet {
  std::string problem;
  std::string mode;
  int bound = 0;
  GroundModel model;
  std::vector<FnDecl> decls;        // hole symbols first, then reach/rank
  std::vector<Term> assertions;     // deterministic order
  std::vector<InstanceEncoding> instances;
  std::vector<Term> extra;          // cost fragment (also part of assertions)
  uint64_t max_cost = 0;            // upper bound of the cost sum, if any
};

struct EncodeOptions {
  int state_budget = kDefaultUcwStateBudget;
  int grounding_budget = kDefaultGroundingBudget;
  // Restrict rank comparisons to automaton SCCs containing a rejecting
  // state; satisfiability-preserving, much smaller scripts.
  bool scc_rank = true;
};

// The product domain of the full extended state space (memory of both
// processes) with the UCW of a spec; the annotation range bound is
// |Q| * |V(X')| + 1.
struct ProductDomain {
  Ucw automaton;
  DomainPtr ext;
  std::vector<Valuation> ext_valuations;
  std::vector<Valuation> input_valuations;  // uncontrollable inputs + sched
  int initial_q = 0;
  Valuation initial_x;
  uint64_t rank_bound = 0;
};

ProductDomain build_product_domain(const GroundModel& m, const Formula& spec,
                                   const EncodeOptions& opts = {});

// Grounds the annotation constraints of one sub-instance; hole symbols for
// refined processes are used as uninterpreted functions, the controllable
// inputs of unrefined processes are grounded universally.
InstanceEncoding encode_instance(const GroundModel& m, const Formula& spec,
                                 const std::vector<int>& refined, int index,
                                 const std::string& tag,
                                 const EncodeOptions& opts = {});

// Assembles the mode's sub-instances over shared hole symbols:
//   cooperative: fair -> (phi1 & phi2), both refined
//   competitive: (fair -> phi1, {1}) and (fair -> phi2, {2})
//   ags:         (fair & phi2 -> phi1, {1}), (fair & phi1 -> phi2, {2}),
//                (fair -> phi1 & phi2, {1,2})
ConstraintSet encode_mode(const GroundModel& m, Mode mode,
                          const EncodeOptions& opts = {});

// Appends the cost-bound fragment: sum of weights over hole-table entries
// whose predicate holds, asserted < opt. Throws semantic_error for opt == 0.
void encode_cost(ConstraintSet& c, uint64_t opt);

Formula fair_formula();  // G F sched_p1 & G F sched_p2

// Builds the instance formulas of a mode over the problem's specs.
std::vector<std::pair<Formula, std::vector<int>>> mode_instances(
    const SynthesisProblem& p, Mode mode);

}  // namespace agsynth
