#include "agsynth/term.hpp"

#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

namespace {

uint64_t mask_of(int width) {
  return width >= 64 ? ~uint64_t(0) : (uint64_t(1) << width) - 1;
}

Term make(TermOp op, Sort sort, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->op = op;
  n->sort = sort;
  n->args = std::move(args);
  return n;
}

}  // namespace

Term t_bool(bool b) {
  auto n = std::make_shared<TermNode>();
  n->op = TermOp::BoolConst;
  n->sort = sort_bool();
  n->bval = b;
  return n;
}

Term t_bv(uint64_t value, int width) {
  auto n = std::make_shared<TermNode>();
  n->op = TermOp::BvConst;
  n->sort = sort_bv(width);
  n->value = value & mask_of(width);
  return n;
}

Term t_var(const std::string& name, Sort sort) {
  auto n = std::make_shared<TermNode>();
  n->op = TermOp::Var;
  n->sort = sort;
  n->name = name;
  return n;
}

Term t_app(const std::string& fn, Sort result, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->op = TermOp::App;
  n->sort = result;
  n->name = fn;
  n->args = std::move(args);
  return n;
}

bool is_const(const Term& t) {
  return t->op == TermOp::BoolConst || t->op == TermOp::BvConst;
}

bool const_bool(const Term& t) {
  if (t->op != TermOp::BoolConst) throw internal_error("const_bool on non-constant");
  return t->bval;
}

uint64_t const_value(const Term& t) {
  if (t->op == TermOp::BoolConst) return t->bval ? 1 : 0;
  if (t->op == TermOp::BvConst) return t->value;
  throw internal_error("const_value on non-constant");
}

Term t_not(Term a) {
  if (a->op == TermOp::BoolConst) return t_bool(!a->bval);
  if (a->op == TermOp::Not) return a->args[0];
  return make(TermOp::Not, sort_bool(), {std::move(a)});
}

Term t_and(Term a, Term b) {
  if (a->op == TermOp::BoolConst) return a->bval ? b : a;
  if (b->op == TermOp::BoolConst) return b->bval ? a : b;
  return make(TermOp::And, sort_bool(), {std::move(a), std::move(b)});
}

Term t_or(Term a, Term b) {
  if (a->op == TermOp::BoolConst) return a->bval ? a : b;
  if (b->op == TermOp::BoolConst) return b->bval ? b : a;
  return make(TermOp::Or, sort_bool(), {std::move(a), std::move(b)});
}

Term t_and(const std::vector<Term>& ts) {
  Term acc = t_bool(true);
  for (const auto& t : ts) acc = t_and(acc, t);
  return acc;
}

Term t_implies(Term a, Term b) {
  if (a->op == TermOp::BoolConst) return a->bval ? b : t_bool(true);
  if (b->op == TermOp::BoolConst && b->bval) return b;
  return make(TermOp::Implies, sort_bool(), {std::move(a), std::move(b)});
}

Term t_eq(Term a, Term b) {
  if (a->sort != b->sort) throw internal_error("t_eq: sort mismatch");
  if (is_const(a) && is_const(b)) return t_bool(const_value(a) == const_value(b));
  if (a->sort.is_bool()) {
    if (a->op == TermOp::BoolConst) return a->bval ? b : t_not(b);
    if (b->op == TermOp::BoolConst) return b->bval ? a : t_not(a);
  }
  return make(TermOp::Eq, sort_bool(), {std::move(a), std::move(b)});
}

Term t_ite(Term c, Term a, Term b) {
  if (a->sort != b->sort) throw internal_error("t_ite: branch sort mismatch");
  if (c->op == TermOp::BoolConst) return c->bval ? a : b;
  Sort s = a->sort;
  return make(TermOp::Ite, s, {std::move(c), std::move(a), std::move(b)});
}

namespace {
Term cmp(TermOp op, Term a, Term b) {
  if (a->sort != b->sort || a->sort.is_bool())
    throw internal_error("bitvector comparison on mismatched sorts");
  if (is_const(a) && is_const(b)) {
    uint64_t x = const_value(a), y = const_value(b);
    switch (op) {
      case TermOp::Uge: return t_bool(x >= y);
      case TermOp::Ugt: return t_bool(x > y);
      case TermOp::Ult: return t_bool(x < y);
      default: break;
    }
  }
  return make(op, sort_bool(), {std::move(a), std::move(b)});
}
}  // namespace

Term t_uge(Term a, Term b) { return cmp(TermOp::Uge, std::move(a), std::move(b)); }
Term t_ugt(Term a, Term b) { return cmp(TermOp::Ugt, std::move(a), std::move(b)); }
Term t_ult(Term a, Term b) { return cmp(TermOp::Ult, std::move(a), std::move(b)); }

namespace {
Term arith(TermOp op, Term a, Term b) {
  if (a->sort != b->sort || a->sort.is_bool())
    throw internal_error("bitvector arithmetic on mismatched sorts");
  int w = a->sort.width;
  if (is_const(a) && is_const(b)) {
    uint64_t x = const_value(a), y = const_value(b);
    uint64_t r = op == TermOp::Add ? x + y : x - y;
    return t_bv(r, w);
  }
  return make(op, sort_bv(w), {std::move(a), std::move(b)});
}
}  // namespace

Term t_add(Term a, Term b) { return arith(TermOp::Add, std::move(a), std::move(b)); }
Term t_sub(Term a, Term b) { return arith(TermOp::Sub, std::move(a), std::move(b)); }

std::string to_string(const Term& t) {
  std::ostringstream out;
  switch (t->op) {
    case TermOp::BoolConst: out << (t->bval ? "true" : "false"); break;
    case TermOp::BvConst: out << t->value << ":" << t->sort.width; break;
    case TermOp::Var: out << t->name; break;
    case TermOp::App: {
      out << t->name << "(";
      for (size_t i = 0; i < t->args.size(); ++i)
        out << (i ? "," : "") << to_string(t->args[i]);
      out << ")";
      break;
    }
    case TermOp::Not: out << "!" << to_string(t->args[0]); break;
    case TermOp::And: out << "(" << to_string(t->args[0]) << " & " << to_string(t->args[1]) << ")"; break;
    case TermOp::Or: out << "(" << to_string(t->args[0]) << " | " << to_string(t->args[1]) << ")"; break;
    case TermOp::Implies: out << "(" << to_string(t->args[0]) << " => " << to_string(t->args[1]) << ")"; break;
    case TermOp::Eq: out << "(" << to_string(t->args[0]) << " == " << to_string(t->args[1]) << ")"; break;
    case TermOp::Ite:
      out << "ite(" << to_string(t->args[0]) << "," << to_string(t->args[1]) << ","
          << to_string(t->args[2]) << ")";
      break;
    case TermOp::Uge: out << "(" << to_string(t->args[0]) << " >= " << to_string(t->args[1]) << ")"; break;
    case TermOp::Ugt: out << "(" << to_string(t->args[0]) << " > " << to_string(t->args[1]) << ")"; break;
    case TermOp::Ult: out << "(" << to_string(t->args[0]) << " < " << to_string(t->args[1]) << ")"; break;
    case TermOp::Add: out << "(" << to_string(t->args[0]) << " + " << to_string(t->args[1]) << ")"; break;
    case TermOp::Sub: out << "(" << to_string(t->args[0]) << " - " << to_string(t->args[1]) << ")"; break;
  }
  return out.str();
}

uint64_t eval_term(const Term& t, const Interpretation& interp) {
  auto mask = [](int w) { return w >= 64 ? ~uint64_t(0) : (uint64_t(1) << w) - 1; };
  switch (t->op) {
    case TermOp::BoolConst: return t->bval ? 1 : 0;
    case TermOp::BvConst: return t->value;
    case TermOp::Var:
      throw internal_error("free variable '" + t->name + "' in closed term");
    case TermOp::App: {
      uint64_t packed = 0;
      for (const auto& a : t->args) {
        uint64_t v = eval_term(a, interp);
        int w = a->sort.is_bool() ? 1 : a->sort.width;
        packed = (packed << w) | (v & mask(w));
      }
      auto it = interp.values.find({t->name, packed});
      if (it == interp.values.end())
        throw internal_error("interpretation missing entry for " + t->name);
      return it->second;
    }
    case TermOp::Not: return !eval_term(t->args[0], interp);
    case TermOp::And: return eval_term(t->args[0], interp) && eval_term(t->args[1], interp);
    case TermOp::Or: return eval_term(t->args[0], interp) || eval_term(t->args[1], interp);
    case TermOp::Implies:
      return !eval_term(t->args[0], interp) || eval_term(t->args[1], interp);
    case TermOp::Eq: return eval_term(t->args[0], interp) == eval_term(t->args[1], interp);
    case TermOp::Ite:
      return eval_term(t->args[0], interp) ? eval_term(t->args[1], interp)
                                           : eval_term(t->args[2], interp);
    case TermOp::Uge: return eval_term(t->args[0], interp) >= eval_term(t->args[1], interp);
    case TermOp::Ugt: return eval_term(t->args[0], interp) > eval_term(t->args[1], interp);
    case TermOp::Ult: return eval_term(t->args[0], interp) < eval_term(t->args[1], interp);
    case TermOp::Add:
      return (eval_term(t->args[0], interp) + eval_term(t->args[1], interp)) &
             mask(t->sort.width);
    case TermOp::Sub:
      return (eval_term(t->args[0], interp) - eval_term(t->args[1], interp)) &
             mask(t->sort.width);
  }
  throw internal_error("eval_term: unhandled op");
}

}  // namespace agsynth
