#pragma once

#include <string>
#include <vector>

#include "agsynth/lasso.hpp"
#include "agsynth/ltl.hpp"

namespace agsynth {

struct UcwTransition {
  int src;
  Formula label;  // propositional formula over signals
  int dst;
};

// Universal co-Buechi automaton. A word is accepted iff every run visits
// rejecting states only finitely often.
struct Ucw {
  int num_states = 0;
  int initial = 0;
  std::vector<UcwTransition> transitions;
  std::vector<bool> rejecting;

  std::vector<std::vector<int>> outgoing() const;  // transition indices by src
};

inline constexpr int kDefaultUcwStateBudget = 10000;

// Translates f by building a nondeterministic Buechi automaton for !f with a
// tableau construction and reinterpreting its accepting states as rejecting.
// Throws budget_error if more than `state_budget` tableau/product states are
// created.
Ucw translate_to_ucw(const Formula& f, int state_budget = kDefaultUcwStateBudget);

// Propositional evaluation of a transition label.
bool eval_label(const Formula& label, const SignalValuation& v);

// { q' | (q, label, q') in transitions, label true under v }, sorted.
std::vector<int> ucw_successors(const Ucw& a, int q, const SignalValuation& v);

// True iff every run over stem.loop^omega visits rejecting states finitely
// often (checked by rejecting-cycle analysis on the loop unrolling).
bool accepts_lasso(const Ucw& a, const Lasso& w);

std::string to_dot(const Ucw& a);

// Strongly connected component index per state (Tarjan, deterministic).
std::vector<int> ucw_scc_of(const Ucw& a);

}  // namespace agsynth
