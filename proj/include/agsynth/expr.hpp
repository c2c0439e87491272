#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agsynth/term.hpp"

namespace agsynth {

// Sketch expression language: booleans and fixed-width unsigned bitvectors
// with wrap-around arithmetic. Width 1 is boolean; &, |, !, ite and (in)
// equality work on it, while +, -, < require width >= 2.
enum class ExprOp : uint8_t {
  Const,
  Var,      // state/input variable or signal reference
  HoleRef,  // ?name
  Not,
  And,
  Or,
  Eq,
  Ne,
  Lt,
  Add,
  Sub,
  Ite,
};

struct ExprNode;
using Expr = std::shared_ptr<ExprNode>;

struct ExprNode {
  ExprOp op;
  uint64_t value = 0;     // Const
  std::string name;       // Var / HoleRef
  std::vector<Expr> kids;
  int width = -1;         // resolved by resolve_widths
};

Expr parse_expr(const std::string& text);
std::string to_string(const Expr& e);
Expr clone_expr(const Expr& e);  // deep copy; widths reset to unresolved

// Resolves widths bottom-up; `lookup` maps a variable/signal or hole name to
// its width (hole names are passed with a '?' prefix). `expected` gives the
// width the context requires (0 when unconstrained). Throws semantic_error on
// inconsistent widths, unknown names, or misuse of arithmetic on booleans.
void resolve_widths(const Expr& e, const std::function<int(const std::string&)>& lookup,
                    int expected);

// A value during partial evaluation: either concrete bits or a symbolic term.
struct SVal {
  int width = 1;
  bool concrete = true;
  uint64_t bits = 0;
  Term term;  // set when !concrete; Bool sort for width 1, BitVec otherwise

  static SVal of(uint64_t v, int w) { return {w, true, v, nullptr}; }
  static SVal sym(Term t, int w) { return {w, false, 0, std::move(t)}; }
  Term as_term() const;
  bool truthy() const;  // concrete width-1 only
};

// Name resolution for evaluation. Variables and signals resolve by name;
// hole references resolve via `hole` (may return symbolic applications).
struct EvalEnv {
  std::function<SVal(const std::string&)> var;
  std::function<SVal(const std::string&)> hole;
};

// Bit-precise evaluation with wrap-around arithmetic. Fully concrete inputs
// yield concrete results; symbolic inputs produce Terms via partial
// evaluation. An absent hole resolver makes ?refs an error (concrete mode
// without tables).
SVal eval_expr(const Expr& e, const EvalEnv& env);

// Convenience for fully concrete evaluation.
uint64_t eval_expr_concrete(const Expr& e, const EvalEnv& env);

// Free variable/signal names (no '?' holes), first-occurrence order.
std::vector<std::string> expr_vars(const Expr& e);
// Referenced hole names.
std::vector<std::string> expr_holes(const Expr& e);

}  // namespace agsynth
