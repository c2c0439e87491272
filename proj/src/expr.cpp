#include "agsynth/expr.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

namespace {

Expr mk(ExprOp op, std::vector<Expr> kids = {}) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->kids = std::move(kids);
  return n;
}

struct ExprToken {
  enum Kind {
    Ident, Number, LParen, RParen, Comma, Question,
    NotOp, AndOp, OrOp, EqOp, NeOp, LtOp, PlusOp, MinusOp, End
  } kind;
  std::string text;
  int pos;
};

class ExprLexer {
public:
  explicit ExprLexer(const std::string& text) : text_(text) { advance(); }
  const ExprToken& peek() const { return tok_; }
  ExprToken next() {
    ExprToken t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    int pos = static_cast<int>(i_) + 1;
    if (i_ >= text_.size()) { tok_ = {ExprToken::End, "", pos}; return; }
    char c = text_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
      tok_ = {ExprToken::Number, text_.substr(i_, j - i_), pos};
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
        ++j;
      tok_ = {ExprToken::Ident, text_.substr(i_, j - i_), pos};
      i_ = j;
      return;
    }
    switch (c) {
      case '(': tok_ = {ExprToken::LParen, "(", pos}; ++i_; return;
      case ')': tok_ = {ExprToken::RParen, ")", pos}; ++i_; return;
      case ',': tok_ = {ExprToken::Comma, ",", pos}; ++i_; return;
      case '?': tok_ = {ExprToken::Question, "?", pos}; ++i_; return;
      case '&': tok_ = {ExprToken::AndOp, "&", pos}; ++i_; return;
      case '|': tok_ = {ExprToken::OrOp, "|", pos}; ++i_; return;
      case '+': tok_ = {ExprToken::PlusOp, "+", pos}; ++i_; return;
      case '-': tok_ = {ExprToken::MinusOp, "-", pos}; ++i_; return;
      case '<': tok_ = {ExprToken::LtOp, "<", pos}; ++i_; return;
      case '=':
        if (i_ + 1 < text_.size() && text_[i_ + 1] == '=') {
          tok_ = {ExprToken::EqOp, "==", pos}; i_ += 2; return;
        }
        throw parse_error("expected '=='", 1, pos);
      case '!':
        if (i_ + 1 < text_.size() && text_[i_ + 1] == '=') {
          tok_ = {ExprToken::NeOp, "!=", pos}; i_ += 2; return;
        }
        tok_ = {ExprToken::NotOp, "!", pos}; ++i_; return;
      default:
        throw parse_error(std::string("unexpected character '") + c + "' in expression",
                          1, pos);
    }
  }

  const std::string& text_;
  size_t i_ = 0;
  ExprToken tok_;
};

// Precedence, loosest first: |, &, comparisons, + -, unary !.
class ExprParser {
public:
  explicit ExprParser(const std::string& text) : lex_(text) {}

  Expr parse() {
    Expr e = parse_or();
    if (lex_.peek().kind != ExprToken::End)
      throw parse_error("trailing input '" + lex_.peek().text + "' in expression", 1,
                        lex_.peek().pos);
    return e;
  }

private:
  Expr parse_or() {
    Expr e = parse_and();
    while (lex_.peek().kind == ExprToken::OrOp) {
      lex_.next();
      e = mk(ExprOp::Or, {e, parse_and()});
    }
    return e;
  }

  Expr parse_and() {
    Expr e = parse_cmp();
    while (lex_.peek().kind == ExprToken::AndOp) {
      lex_.next();
      e = mk(ExprOp::And, {e, parse_cmp()});
    }
    return e;
  }

  Expr parse_cmp() {
    Expr e = parse_sum();
    switch (lex_.peek().kind) {
      case ExprToken::EqOp: lex_.next(); return mk(ExprOp::Eq, {e, parse_sum()});
      case ExprToken::NeOp: lex_.next(); return mk(ExprOp::Ne, {e, parse_sum()});
      case ExprToken::LtOp: lex_.next(); return mk(ExprOp::Lt, {e, parse_sum()});
      default: return e;
    }
  }

  Expr parse_sum() {
    Expr e = parse_unary();
    for (;;) {
      if (lex_.peek().kind == ExprToken::PlusOp) {
        lex_.next();
        e = mk(ExprOp::Add, {e, parse_unary()});
      } else if (lex_.peek().kind == ExprToken::MinusOp) {
        lex_.next();
        e = mk(ExprOp::Sub, {e, parse_unary()});
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (lex_.peek().kind == ExprToken::NotOp) {
      lex_.next();
      return mk(ExprOp::Not, {parse_unary()});
    }
    return parse_primary();
  }

  Expr parse_primary() {
    ExprToken t = lex_.next();
    switch (t.kind) {
      case ExprToken::LParen: {
        Expr e = parse_or();
        ExprToken close = lex_.next();
        if (close.kind != ExprToken::RParen)
          throw parse_error("expected ')' in expression", 1, close.pos);
        return e;
      }
      case ExprToken::Question: {
        ExprToken name = lex_.next();
        if (name.kind != ExprToken::Ident)
          throw parse_error("expected hole name after '?'", 1, name.pos);
        auto e = mk(ExprOp::HoleRef);
        e->name = name.text;
        return e;
      }
      case ExprToken::Number: {
        auto e = mk(ExprOp::Const);
        e->value = std::stoull(t.text);
        return e;
      }
      case ExprToken::Ident: {
        if (t.text == "true" || t.text == "false") {
          auto e = mk(ExprOp::Const);
          e->value = t.text == "true" ? 1 : 0;
          e->width = 1;
          return e;
        }
        if (t.text == "ite") {
          ExprToken open = lex_.next();
          if (open.kind != ExprToken::LParen)
            throw parse_error("expected '(' after ite", 1, open.pos);
          Expr c = parse_or();
          if (lex_.next().kind != ExprToken::Comma)
            throw parse_error("expected ',' in ite", 1, lex_.peek().pos);
          Expr a = parse_or();
          if (lex_.next().kind != ExprToken::Comma)
            throw parse_error("expected ',' in ite", 1, lex_.peek().pos);
          Expr b = parse_or();
          ExprToken close = lex_.next();
          if (close.kind != ExprToken::RParen)
            throw parse_error("expected ')' closing ite", 1, close.pos);
          return mk(ExprOp::Ite, {c, a, b});
        }
        auto e = mk(ExprOp::Var);
        e->name = t.text;
        return e;
      }
      default:
        throw parse_error("expected expression, got '" + t.text + "'", 1, t.pos);
    }
  }

  ExprLexer lex_;
};

int min_width(uint64_t v) {
  int w = 1;
  while (w < 64 && (v >> w) != 0) ++w;
  return w;
}

}  // namespace

Expr parse_expr(const std::string& text) { return ExprParser(text).parse(); }

Expr clone_expr(const Expr& e) {
  auto n = std::make_shared<ExprNode>();
  n->op = e->op;
  n->value = e->value;
  n->name = e->name;
  n->width = e->width;
  for (const auto& k : e->kids) n->kids.push_back(clone_expr(k));
  return n;
}

std::string to_string(const Expr& e) {
  std::ostringstream out;
  switch (e->op) {
    case ExprOp::Const:
      if (e->width == 1) out << (e->value ? "true" : "false");
      else out << e->value;
      break;
    case ExprOp::Var: out << e->name; break;
    case ExprOp::HoleRef: out << "?" << e->name; break;
    case ExprOp::Not: out << "!" << to_string(e->kids[0]); break;
    case ExprOp::And:
      out << "(" << to_string(e->kids[0]) << " & " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Or:
      out << "(" << to_string(e->kids[0]) << " | " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Eq:
      out << "(" << to_string(e->kids[0]) << " == " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Ne:
      out << "(" << to_string(e->kids[0]) << " != " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Lt:
      out << "(" << to_string(e->kids[0]) << " < " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Add:
      out << "(" << to_string(e->kids[0]) << " + " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Sub:
      out << "(" << to_string(e->kids[0]) << " - " << to_string(e->kids[1]) << ")";
      break;
    case ExprOp::Ite:
      out << "ite(" << to_string(e->kids[0]) << ", " << to_string(e->kids[1]) << ", "
          << to_string(e->kids[2]) << ")";
      break;
  }
  return out.str();
}

void resolve_widths(const Expr& e, const std::function<int(const std::string&)>& lookup,
                    int expected) {
  auto check = [&](int got) {
    if (expected > 0 && got != expected)
      throw semantic_error("width mismatch in '" + to_string(e) + "': expected " +
                           std::to_string(expected) + ", got " + std::to_string(got));
  };
  switch (e->op) {
    case ExprOp::Const: {
      int w = expected > 0 ? expected : (e->width > 0 ? e->width : min_width(e->value));
      if (min_width(e->value) > w)
        throw semantic_error("constant " + std::to_string(e->value) +
                             " does not fit in width " + std::to_string(w));
      e->width = w;
      return;
    }
    case ExprOp::Var: {
      e->width = lookup(e->name);
      check(e->width);
      return;
    }
    case ExprOp::HoleRef: {
      e->width = lookup("?" + e->name);
      check(e->width);
      return;
    }
    case ExprOp::Not:
      resolve_widths(e->kids[0], lookup, 1);
      e->width = 1;
      check(1);
      return;
    case ExprOp::And:
    case ExprOp::Or:
      resolve_widths(e->kids[0], lookup, 1);
      resolve_widths(e->kids[1], lookup, 1);
      e->width = 1;
      check(1);
      return;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt: {
      // Constants adopt the width of the other side.
      if (e->kids[0]->op == ExprOp::Const && e->kids[1]->op != ExprOp::Const) {
        resolve_widths(e->kids[1], lookup, 0);
        resolve_widths(e->kids[0], lookup, e->kids[1]->width);
      } else {
        resolve_widths(e->kids[0], lookup, 0);
        resolve_widths(e->kids[1], lookup, e->kids[0]->width);
      }
      if (e->op == ExprOp::Lt && e->kids[0]->width < 2)
        throw semantic_error("'<' needs bitvector operands: " + to_string(e));
      e->width = 1;
      check(1);
      return;
    }
    case ExprOp::Add:
    case ExprOp::Sub: {
      if (e->kids[0]->op == ExprOp::Const && e->kids[1]->op != ExprOp::Const) {
        resolve_widths(e->kids[1], lookup, expected);
        resolve_widths(e->kids[0], lookup, e->kids[1]->width);
      } else {
        resolve_widths(e->kids[0], lookup, expected);
        resolve_widths(e->kids[1], lookup, e->kids[0]->width);
      }
      e->width = e->kids[0]->width;
      if (e->width < 2)
        throw semantic_error("arithmetic needs bitvector operands: " + to_string(e));
      check(e->width);
      return;
    }
    case ExprOp::Ite: {
      resolve_widths(e->kids[0], lookup, 1);
      if (e->kids[1]->op == ExprOp::Const && e->kids[2]->op != ExprOp::Const) {
        resolve_widths(e->kids[2], lookup, expected);
        resolve_widths(e->kids[1], lookup, e->kids[2]->width);
      } else {
        resolve_widths(e->kids[1], lookup, expected);
        resolve_widths(e->kids[2], lookup, e->kids[1]->width);
      }
      e->width = e->kids[1]->width;
      check(e->width);
      return;
    }
  }
}

Term SVal::as_term() const {
  if (!concrete) return term;
  return width == 1 ? t_bool(bits != 0) : t_bv(bits, width);
}

bool SVal::truthy() const {
  if (!concrete) throw internal_error("truthy() on symbolic value");
  return bits != 0;
}

namespace {

uint64_t wmask(int w) { return w >= 64 ? ~uint64_t(0) : (uint64_t(1) << w) - 1; }

SVal sval_not(const SVal& a) {
  if (a.concrete) return SVal::of(!a.bits, 1);
  return SVal::sym(t_not(a.term), 1);
}

SVal sval_bin(ExprOp op, const SVal& a, const SVal& b, int width) {
  if (a.concrete && b.concrete) {
    uint64_t x = a.bits, y = b.bits;
    switch (op) {
      case ExprOp::And: return SVal::of(x && y, 1);
      case ExprOp::Or: return SVal::of(x || y, 1);
      case ExprOp::Eq: return SVal::of(x == y, 1);
      case ExprOp::Ne: return SVal::of(x != y, 1);
      case ExprOp::Lt: return SVal::of(x < y, 1);
      case ExprOp::Add: return SVal::of((x + y) & wmask(width), width);
      case ExprOp::Sub: return SVal::of((x - y) & wmask(width), width);
      default: throw internal_error("sval_bin: bad op");
    }
  }
  Term ta = a.as_term(), tb = b.as_term();
  switch (op) {
    case ExprOp::And: return SVal::sym(t_and(ta, tb), 1);
    case ExprOp::Or: return SVal::sym(t_or(ta, tb), 1);
    case ExprOp::Eq: return SVal::sym(t_eq(ta, tb), 1);
    case ExprOp::Ne: return SVal::sym(t_not(t_eq(ta, tb)), 1);
    case ExprOp::Lt: return SVal::sym(t_ult(ta, tb), 1);
    case ExprOp::Add: return SVal::sym(t_add(ta, tb), width);
    case ExprOp::Sub: return SVal::sym(t_sub(ta, tb), width);
    default: throw internal_error("sval_bin: bad op");
  }
}

}  // namespace

SVal eval_expr(const Expr& e, const EvalEnv& env) {
  if (e->width < 0)
    throw internal_error("expression evaluated before width resolution: " + to_string(e));
  switch (e->op) {
    case ExprOp::Const: return SVal::of(e->value, e->width);
    case ExprOp::Var: {
      SVal v = env.var(e->name);
      if (v.width != e->width)
        throw internal_error("width drift for '" + e->name + "'");
      return v;
    }
    case ExprOp::HoleRef: {
      if (!env.hole)
        throw semantic_error("unresolved hole '?" + e->name +
                             "' in concrete evaluation");
      return env.hole(e->name);
    }
    case ExprOp::Not: return sval_not(eval_expr(e->kids[0], env));
    case ExprOp::And: {
      SVal a = eval_expr(e->kids[0], env);
      if (a.concrete && !a.bits) return SVal::of(0, 1);
      SVal b = eval_expr(e->kids[1], env);
      return sval_bin(ExprOp::And, a, b, 1);
    }
    case ExprOp::Or: {
      SVal a = eval_expr(e->kids[0], env);
      if (a.concrete && a.bits) return SVal::of(1, 1);
      SVal b = eval_expr(e->kids[1], env);
      return sval_bin(ExprOp::Or, a, b, 1);
    }
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Add:
    case ExprOp::Sub:
      return sval_bin(e->op, eval_expr(e->kids[0], env), eval_expr(e->kids[1], env),
                      e->width);
    case ExprOp::Ite: {
      SVal c = eval_expr(e->kids[0], env);
      if (c.concrete) return eval_expr(e->kids[c.bits ? 1 : 2], env);
      SVal a = eval_expr(e->kids[1], env);
      SVal b = eval_expr(e->kids[2], env);
      return SVal::sym(t_ite(c.as_term(), a.as_term(), b.as_term()), e->width);
    }
  }
  throw internal_error("eval_expr: unhandled op");
}

uint64_t eval_expr_concrete(const Expr& e, const EvalEnv& env) {
  SVal v = eval_expr(e, env);
  if (!v.concrete)
    throw internal_error("expected concrete value for: " + to_string(e));
  return v.bits;
}

namespace {
void walk(const Expr& e, std::vector<std::string>& vars, std::vector<std::string>& holes,
          std::set<std::string>& seen_v, std::set<std::string>& seen_h) {
  if (e->op == ExprOp::Var) {
    if (seen_v.insert(e->name).second) vars.push_back(e->name);
  } else if (e->op == ExprOp::HoleRef) {
    if (seen_h.insert(e->name).second) holes.push_back(e->name);
  }
  for (const auto& k : e->kids) walk(k, vars, holes, seen_v, seen_h);
}
}  // namespace

std::vector<std::string> expr_vars(const Expr& e) {
  std::vector<std::string> vars, holes;
  std::set<std::string> sv, sh;
  walk(e, vars, holes, sv, sh);
  return vars;
}

std::vector<std::string> expr_holes(const Expr& e) {
  std::vector<std::string> vars, holes;
  std::set<std::string> sv, sh;
  walk(e, vars, holes, sv, sh);
  return holes;
}

}  // namespace agsynth
