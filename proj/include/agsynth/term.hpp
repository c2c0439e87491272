#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace agsynth {

// Sorts for grounded constraints: Bool or a finite bitvector. Bounded
// naturals are realized as bitvectors with unsigned comparisons.
struct Sort {
  int width = 0;  // 0 means Bool, otherwise BitVec width

  bool is_bool() const { return width == 0; }
  bool operator==(const Sort& o) const { return width == o.width; }
  bool operator!=(const Sort& o) const { return width != o.width; }
};

inline Sort sort_bool() { return {0}; }
inline Sort sort_bv(int w) { return {w}; }

enum class TermOp : uint8_t {
  BoolConst,
  BvConst,
  Var,
  App,   // uninterpreted function application
  Not,
  And,
  Or,
  Implies,
  Eq,
  Ite,
  Uge,   // unsigned >=
  Ugt,   // unsigned >
  Ult,   // unsigned <
  Add,
  Sub,
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  TermOp op;
  Sort sort;
  bool bval = false;        // BoolConst
  uint64_t value = 0;       // BvConst
  std::string name;         // Var / App symbol
  std::vector<Term> args;
};

// Constructors perform constant folding and light simplification so that the
// encoder's partial evaluation collapses fully concrete subterms.
Term t_bool(bool b);
Term t_bv(uint64_t value, int width);
Term t_var(const std::string& name, Sort sort);
Term t_app(const std::string& fn, Sort result, std::vector<Term> args);
Term t_not(Term a);
Term t_and(Term a, Term b);
Term t_or(Term a, Term b);
Term t_and(const std::vector<Term>& ts);
Term t_implies(Term a, Term b);
Term t_eq(Term a, Term b);
Term t_ite(Term c, Term a, Term b);
Term t_uge(Term a, Term b);
Term t_ugt(Term a, Term b);
Term t_ult(Term a, Term b);
Term t_add(Term a, Term b);
Term t_sub(Term a, Term b);

bool is_const(const Term& t);
bool const_bool(const Term& t);
uint64_t const_value(const Term& t);

std::string to_string(const Term& t);

// Declared uninterpreted function: a strategy-table symbol or one of the
// per-instance annotation symbols.
struct FnDecl {
  enum class Kind { Hole, ReachFlag, Rank } kind;
  std::string name;
  std::vector<Sort> args;
  Sort result;
  int instance = -1;        // ReachFlag/Rank: owning sub-instance
  std::string hole_name;    // Hole: source hole in the problem
};

// An interpretation assigns every concrete application a value; used by the
// enumerative backend and for cost evaluation.
struct Interpretation {
  // key: fn name + packed argument bits; value: result bits (bool as 0/1)
  std::map<std::pair<std::string, uint64_t>, uint64_t> values;
};

// Evaluates a closed term (constants and applications only; Var is an error)
// under an interpretation. Bool results are 0/1.
uint64_t eval_term(const Term& t, const Interpretation& interp);

}  // namespace agsynth
