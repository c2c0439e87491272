#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agsynth/expr.hpp"
#include "agsynth/lasso.hpp"
#include "agsynth/ltl.hpp"
#include "agsynth/valuation.hpp"

namespace agsynth {

enum class Owner : uint8_t { P1, P2, Shared };
enum class VarKind : uint8_t { State, Input };

// The implicit scheduling variable, an uncontrollable input of both
// processes. sched = 1 schedules process 1.
inline constexpr const char* kSchedVar = "sched";

struct VarDecl {
  std::string name;
  int width = 1;
  Owner owner = Owner::Shared;
  VarKind kind = VarKind::State;
  uint64_t init = 0;
  bool has_init = false;
};

enum class HoleRole : uint8_t { Control, MemoryUpdate };

struct HoleDecl {
  std::string name;
  int process = 1;                     // owning process, 1 or 2
  std::vector<std::string> outputs;    // controllable input variables
  std::vector<std::string> observes;   // vars, signals, or the token "mem"
};

struct MemoryDecl {
  bool declared = false;
  bool shared = false;
  std::vector<std::string> observes;   // vars, signals, or "mem"
};

struct SignalDef {
  std::string name;
  Expr def;       // boolean expression over state and input variables
  bool implicit;  // auto-defined from a width-1 variable of the same name
};

struct CostDecl {
  std::string name;
  std::string hole;  // counted hole (control name or mu_p1 / mu_p2)
  Expr pred;         // over the hole's observed names and ?hole
  int weight = 1;
};

struct ProcessDecl {
  // Assignment per writable state variable; shared variables may be assigned
  // in both processes, missing shared assignments default to identity.
  std::vector<std::pair<std::string, Expr>> assigns;
  const Expr* assign_for(const std::string& var) const;
};

struct SynthesisProblem {
  std::string name;
  std::vector<VarDecl> vars;           // declaration order; includes sched
  std::vector<HoleDecl> holes;
  MemoryDecl memory[2];                // [0] for p1, [1] for p2
  std::vector<SignalDef> signals;      // explicit then implicit
  ProcessDecl procs[2];
  Formula spec[2];
  std::vector<CostDecl> costs;

  const VarDecl* find_var(const std::string& n) const;
  const SignalDef* find_signal(const std::string& n) const;
  const HoleDecl* find_hole(const std::string& n) const;
  bool is_controllable(const std::string& var) const;  // some hole outputs it
  const HoleDecl* hole_writing(const std::string& var) const;

  // Variable name lists in declaration order.
  std::vector<std::string> state_vars_of(int process) const;   // X_i (incl shared)
  std::vector<std::string> foreign_state_of(int process) const;  // O_i
  std::vector<std::string> input_vars_of(int process) const;   // I_i (incl sched)
  std::vector<std::string> all_signal_names() const;           // incl builtins
};

SynthesisProblem parse_problem(const std::string& text);
std::string render_problem(const SynthesisProblem& p);

// Structural equality via the canonical rendering.
bool same_problem(const SynthesisProblem& a, const SynthesisProblem& b);

// ---------------------------------------------------------------------------
// Problem instantiated at a memory bound b.
// ---------------------------------------------------------------------------

struct ObsArg {
  std::string name;  // variable, signal name, or "mem"
  int width = 1;
};

// A hole with its observation domain resolved at a bound: the row index packs
// the observed values with the first observation in the most significant
// bits; output bits pack the first output variable highest.
struct GroundHole {
  std::string name;
  int process = 1;
  HoleRole role = HoleRole::Control;
  std::vector<ObsArg> args;
  std::vector<std::pair<std::string, int>> outputs;  // name/width; mem block for mu
  int arg_bits = 0;
  int out_width = 0;
  uint64_t rows() const { return uint64_t(1) << arg_bits; }
};

struct GroundModel {
  std::shared_ptr<const SynthesisProblem> prob;  // owned copy
  int bound = 0;
  std::vector<VarDecl> mem_vars;       // m1_0.. / m2_0.., or m_0.. when shared
  std::vector<GroundHole> holes;       // control holes then memory updates
  std::vector<CostDecl> costs;         // predicates width-resolved at this bound
  DomainPtr state_dom;                 // X, declaration order
  DomainPtr ext_dom;                   // X plus all memory (X')
  DomainPtr unctrl_input_dom;          // uncontrollable inputs, sched last
  DomainPtr ctrl_dom;                  // controllable inputs
  DomainPtr step_dom;                  // ext + unctrl inputs (incl sched)

  const GroundHole* find_hole(const std::string& n) const;
  // Memory variable names belonging to process i (shared block for both).
  std::vector<std::string> mem_vars_of(int process) const;
  // X plus the memory of the given refined processes.
  DomainPtr ext_dom_for(const std::vector<int>& refined) const;
  Valuation initial_ext() const;  // v0 restricted to X', memory all-false
};

GroundModel ground(const SynthesisProblem& p, int bound);

// ---------------------------------------------------------------------------
// Strategy tables and execution semantics.
// ---------------------------------------------------------------------------

struct HoleTable {
  std::vector<uint64_t> rows;  // size 2^arg_bits, each out_width bits wide
};

struct StrategyTables {
  int bound = 0;
  std::string mode = "ags";
  std::map<std::string, HoleTable> tables;

  bool has(const std::string& hole) const { return tables.count(hole) != 0; }
  uint64_t lookup(const std::string& hole, uint64_t row) const;
};

// Evaluation environment over a concrete step valuation: resolves variables,
// memory, signals, and hole outputs (through `t`; pass nullptr to make hole
// references an error). `g` must cover ext_dom plus the uncontrollable
// inputs; hole outputs are computed, never read from g.
EvalEnv make_concrete_env(const GroundModel& m, const StrategyTables* t,
                          const Valuation& g);

// Row index of a hole under the environment (packs observed values).
uint64_t hole_row(const GroundModel& m, const GroundHole& h, const EvalEnv& env);

// One interleaving step: the scheduled process updates its state and memory
// through its transition assignments and memory-update hole; everything of
// the other process (and unwritten shared state) stays unchanged. Returns the
// next valuation over ext_dom.
Valuation step(const GroundModel& m, const StrategyTables& t, const Valuation& g);

// Evaluates every signal plus the builtins sched_p1 / sched_p2.
SignalValuation signals_of(const GroundModel& m, const StrategyTables* t,
                           const Valuation& g);

}  // namespace agsynth
