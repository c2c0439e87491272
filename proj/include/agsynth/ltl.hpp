#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace agsynth {

enum class LtlOp : uint8_t {
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  Until,
  Release,
  Eventually,
  Always,
};

struct FormulaNode;

// Formulas are immutable and hash-consed: structurally equal formulas are the
// same node, so pointer equality is structural equality and node ids give a
// stable, run-independent order.
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  LtlOp op;
  std::string atom;                // for LtlOp::Atom
  std::vector<Formula> children;   // 0, 1 or 2 entries
  uint64_t id;                     // interning order, deterministic

  const Formula& left() const { return children[0]; }
  const Formula& right() const { return children[1]; }
};

Formula mk_atom(const std::string& name);
Formula mk_true();
Formula mk_false();
Formula mk_not(Formula f);
Formula mk_and(Formula a, Formula b);
Formula mk_or(Formula a, Formula b);
Formula mk_implies(Formula a, Formula b);
Formula mk_iff(Formula a, Formula b);
Formula mk_next(Formula f);
Formula mk_until(Formula a, Formula b);
Formula mk_release(Formula a, Formula b);
Formula mk_eventually(Formula f);
Formula mk_always(Formula f);

// n-ary convenience; returns true/false constants for empty input.
Formula mk_and(const std::vector<Formula>& fs);
Formula mk_or(const std::vector<Formula>& fs);

std::string to_string(const Formula& f);

// Parses the concrete LTL syntax. Atoms must be members of `signals` or one
// of the builtins sched_p1 / sched_p2. An empty signal list with
// `any_atom = true` accepts every identifier (used by the translate tool).
Formula parse_ltl(const std::string& text, const std::vector<std::string>& signals,
                  bool any_atom = false);

// Negation normal form: `not` only over atoms, implies/iff expanded,
// F/G rewritten to until/release.
Formula to_nnf(const Formula& f);
Formula negate_nnf(const Formula& f);  // to_nnf of the negation

bool is_nnf(const Formula& f);

// Atoms occurring in f, in first-occurrence order.
std::vector<std::string> atoms_of(const Formula& f);

}  // namespace agsynth
