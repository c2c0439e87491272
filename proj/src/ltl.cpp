#include "agsynth/ltl.hpp"

#include <cctype>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

namespace {

struct InternKey {
  LtlOp op;
  std::string atom;
  std::vector<const FormulaNode*> children;

  bool operator<(const InternKey& o) const {
    if (op != o.op) return op < o.op;
    if (atom != o.atom) return atom < o.atom;
    return children < o.children;
  }
};

std::mutex g_intern_mutex;
std::map<InternKey, std::weak_ptr<const FormulaNode>>& intern_table() {
  static std::map<InternKey, std::weak_ptr<const FormulaNode>> table;
  return table;
}
uint64_t g_next_id = 1;

Formula intern(LtlOp op, std::string atom, std::vector<Formula> children) {
  InternKey key;
  key.op = op;
  key.atom = atom;
  for (const auto& c : children) key.children.push_back(c.get());

  std::lock_guard<std::mutex> lock(g_intern_mutex);
  auto& table = intern_table();
  auto it = table.find(key);
  if (it != table.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  auto node = std::make_shared<FormulaNode>();
  node->op = op;
  node->atom = std::move(atom);
  node->children = std::move(children);
  node->id = g_next_id++;
  table[key] = node;
  return node;
}

}  // namespace

Formula mk_atom(const std::string& name) { return intern(LtlOp::Atom, name, {}); }
Formula mk_true() { return intern(LtlOp::True, "", {}); }
Formula mk_false() { return intern(LtlOp::False, "", {}); }
Formula mk_not(Formula f) { return intern(LtlOp::Not, "", {std::move(f)}); }
Formula mk_and(Formula a, Formula b) {
  return intern(LtlOp::And, "", {std::move(a), std::move(b)});
}
Formula mk_or(Formula a, Formula b) {
  return intern(LtlOp::Or, "", {std::move(a), std::move(b)});
}
Formula mk_implies(Formula a, Formula b) {
  return intern(LtlOp::Implies, "", {std::move(a), std::move(b)});
}
Formula mk_iff(Formula a, Formula b) {
  return intern(LtlOp::Iff, "", {std::move(a), std::move(b)});
}
Formula mk_next(Formula f) { return intern(LtlOp::Next, "", {std::move(f)}); }
Formula mk_until(Formula a, Formula b) {
  return intern(LtlOp::Until, "", {std::move(a), std::move(b)});
}
Formula mk_release(Formula a, Formula b) {
  return intern(LtlOp::Release, "", {std::move(a), std::move(b)});
}
Formula mk_eventually(Formula f) {
  return intern(LtlOp::Eventually, "", {std::move(f)});
}
Formula mk_always(Formula f) { return intern(LtlOp::Always, "", {std::move(f)}); }

Formula mk_and(const std::vector<Formula>& fs) {
  if (fs.empty()) return mk_true();
  Formula acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
  return acc;
}

Formula mk_or(const std::vector<Formula>& fs) {
  if (fs.empty()) return mk_false();
  Formula acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_or(acc, fs[i]);
  return acc;
}

namespace {

int precedence(LtlOp op) {
  switch (op) {
    case LtlOp::Iff: return 1;
    case LtlOp::Implies: return 2;
    case LtlOp::Or: return 3;
    case LtlOp::And: return 4;
    case LtlOp::Until:
    case LtlOp::Release: return 5;
    default: return 9;  // unary and leaves
  }
}

void print(const Formula& f, std::ostringstream& out, int parent_prec) {
  int prec = precedence(f->op);
  bool paren = prec < parent_prec;
  auto open = [&]() { if (paren) out << "("; };
  auto close = [&]() { if (paren) out << ")"; };
  switch (f->op) {
    case LtlOp::Atom: out << f->atom; return;
    case LtlOp::True: out << "true"; return;
    case LtlOp::False: out << "false"; return;
    case LtlOp::Not: out << "!"; print(f->left(), out, 9); return;
    case LtlOp::Next: out << "X "; print(f->left(), out, 9); return;
    case LtlOp::Eventually: out << "F "; print(f->left(), out, 9); return;
    case LtlOp::Always: out << "G "; print(f->left(), out, 9); return;
    case LtlOp::And:
      open(); print(f->left(), out, prec); out << " & "; print(f->right(), out, prec + 1); close();
      return;
    case LtlOp::Or:
      open(); print(f->left(), out, prec); out << " | "; print(f->right(), out, prec + 1); close();
      return;
    case LtlOp::Implies:
      open(); print(f->left(), out, prec + 1); out << " -> "; print(f->right(), out, prec); close();
      return;
    case LtlOp::Iff:
      open(); print(f->left(), out, prec); out << " <-> "; print(f->right(), out, prec + 1); close();
      return;
    case LtlOp::Until:
      open(); print(f->left(), out, prec + 1); out << " U "; print(f->right(), out, prec); close();
      return;
    case LtlOp::Release:
      open(); print(f->left(), out, prec + 1); out << " R "; print(f->right(), out, prec); close();
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream out;
  print(f, out, 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser. Precedence, loosest first: <->, ->, |, &, U/R/W, unary (! G F X).
// -> is right-associative, the other binaries left-associative.
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, LParen, RParen, NotOp, AndOp, OrOp, ImpliesOp, IffOp, End } kind;
  std::string text;
  int pos;  // column, 1-based
};

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    int pos = static_cast<int>(i_) + 1;
    if (i_ >= text_.size()) {
      tok_ = {Token::End, "", pos};
      return;
    }
    char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
        ++j;
      tok_ = {Token::Ident, text_.substr(i_, j - i_), pos};
      i_ = j;
      return;
    }
    switch (c) {
      case '(': tok_ = {Token::LParen, "(", pos}; ++i_; return;
      case ')': tok_ = {Token::RParen, ")", pos}; ++i_; return;
      case '!': tok_ = {Token::NotOp, "!", pos}; ++i_; return;
      case '&': tok_ = {Token::AndOp, "&", pos}; ++i_; return;
      case '|': tok_ = {Token::OrOp, "|", pos}; ++i_; return;
      case '-':
        if (i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
          tok_ = {Token::ImpliesOp, "->", pos};
          i_ += 2;
          return;
        }
        throw parse_error("expected '->'", 1, pos);
      case '<':
        if (i_ + 2 < text_.size() + 1 && text_.compare(i_, 3, "<->") == 0) {
          tok_ = {Token::IffOp, "<->", pos};
          i_ += 3;
          return;
        }
        throw parse_error("expected '<->'", 1, pos);
      default:
        throw parse_error(std::string("unexpected character '") + c + "'", 1, pos);
    }
  }

  const std::string& text_;
  size_t i_ = 0;
  Token tok_;
};

class LtlParser {
public:
  LtlParser(const std::string& text, const std::vector<std::string>& signals, bool any_atom)
      : lex_(text), any_atom_(any_atom) {
    signals_.insert(signals.begin(), signals.end());
    signals_.insert("sched_p1");
    signals_.insert("sched_p2");
  }

  Formula parse() {
    Formula f = parse_iff();
    if (lex_.peek().kind != Token::End)
      throw parse_error("trailing input '" + lex_.peek().text + "'", 1, lex_.peek().pos);
    return f;
  }

private:
  Formula parse_iff() {
    Formula f = parse_implies();
    while (lex_.peek().kind == Token::IffOp) {
      lex_.next();
      f = mk_iff(f, parse_implies());
    }
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (lex_.peek().kind == Token::ImpliesOp) {
      lex_.next();
      return mk_implies(f, parse_implies());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex_.peek().kind == Token::OrOp) {
      lex_.next();
      f = mk_or(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_temporal();
    while (lex_.peek().kind == Token::AndOp) {
      lex_.next();
      f = mk_and(f, parse_temporal());
    }
    return f;
  }

  Formula parse_temporal() {
    Formula f = parse_unary();
    if (lex_.peek().kind == Token::Ident &&
        (lex_.peek().text == "U" || lex_.peek().text == "R" || lex_.peek().text == "W")) {
      std::string op = lex_.next().text;
      Formula rhs = parse_temporal();  // right-associative
      if (op == "U") return mk_until(f, rhs);
      if (op == "R") return mk_release(f, rhs);
      return mk_release(rhs, mk_or(rhs, f));  // a W b == b R (b | a)
    }
    return f;
  }

  Formula parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::NotOp) {
      lex_.next();
      return mk_not(parse_unary());
    }
    if (t.kind == Token::Ident) {
      if (t.text == "G") { lex_.next(); return mk_always(parse_unary()); }
      if (t.text == "F") { lex_.next(); return mk_eventually(parse_unary()); }
      if (t.text == "X") { lex_.next(); return mk_next(parse_unary()); }
    }
    return parse_primary();
  }

  Formula parse_primary() {
    Token t = lex_.next();
    if (t.kind == Token::LParen) {
      Formula f = parse_iff();
      Token close = lex_.next();
      if (close.kind != Token::RParen)
        throw parse_error("expected ')'", 1, close.pos);
      return f;
    }
    if (t.kind == Token::Ident) {
      if (t.text == "true") return mk_true();
      if (t.text == "false") return mk_false();
      if (t.text == "U" || t.text == "R" || t.text == "W" || t.text == "G" ||
          t.text == "F" || t.text == "X")
        throw parse_error("operator '" + t.text + "' needs an operand", 1, t.pos);
      if (!any_atom_ && signals_.find(t.text) == signals_.end())
        throw semantic_error("undeclared atom '" + t.text + "'");
      return mk_atom(t.text);
    }
    throw parse_error("expected formula, got '" + t.text + "'", 1, t.pos);
  }

  Lexer lex_;
  bool any_atom_;
  std::set<std::string> signals_;
};

}  // namespace

Formula parse_ltl(const std::string& text, const std::vector<std::string>& signals,
                  bool any_atom) {
  return LtlParser(text, signals, any_atom).parse();
}

// ---------------------------------------------------------------------------
// Negation normal form
// ---------------------------------------------------------------------------

namespace {

Formula nnf(const Formula& f, bool positive) {
  switch (f->op) {
    case LtlOp::Atom: return positive ? f : mk_not(f);
    case LtlOp::True: return positive ? mk_true() : mk_false();
    case LtlOp::False: return positive ? mk_false() : mk_true();
    case LtlOp::Not: return nnf(f->left(), !positive);
    case LtlOp::And:
      return positive ? mk_and(nnf(f->left(), true), nnf(f->right(), true))
                      : mk_or(nnf(f->left(), false), nnf(f->right(), false));
    case LtlOp::Or:
      return positive ? mk_or(nnf(f->left(), true), nnf(f->right(), true))
                      : mk_and(nnf(f->left(), false), nnf(f->right(), false));
    case LtlOp::Implies:
      return positive ? mk_or(nnf(f->left(), false), nnf(f->right(), true))
                      : mk_and(nnf(f->left(), true), nnf(f->right(), false));
    case LtlOp::Iff:
      if (positive)
        return mk_or(mk_and(nnf(f->left(), true), nnf(f->right(), true)),
                     mk_and(nnf(f->left(), false), nnf(f->right(), false)));
      return mk_or(mk_and(nnf(f->left(), true), nnf(f->right(), false)),
                   mk_and(nnf(f->left(), false), nnf(f->right(), true)));
    case LtlOp::Next: return mk_next(nnf(f->left(), positive));
    case LtlOp::Until:
      return positive ? mk_until(nnf(f->left(), true), nnf(f->right(), true))
                      : mk_release(nnf(f->left(), false), nnf(f->right(), false));
    case LtlOp::Release:
      return positive ? mk_release(nnf(f->left(), true), nnf(f->right(), true))
                      : mk_until(nnf(f->left(), false), nnf(f->right(), false));
    case LtlOp::Eventually:
      return positive ? mk_until(mk_true(), nnf(f->left(), true))
                      : mk_release(mk_false(), nnf(f->left(), false));
    case LtlOp::Always:
      return positive ? mk_release(mk_false(), nnf(f->left(), true))
                      : mk_until(mk_true(), nnf(f->left(), false));
  }
  throw internal_error("nnf: unhandled operator");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, true); }
Formula negate_nnf(const Formula& f) { return nnf(f, false); }

bool is_nnf(const Formula& f) {
  switch (f->op) {
    case LtlOp::Atom:
    case LtlOp::True:
    case LtlOp::False: return true;
    case LtlOp::Not: return f->left()->op == LtlOp::Atom;
    case LtlOp::Implies:
    case LtlOp::Iff:
    case LtlOp::Eventually:
    case LtlOp::Always: return false;
    default:
      for (const auto& c : f->children)
        if (!is_nnf(c)) return false;
      return true;
  }
}

namespace {
void collect_atoms(const Formula& f, std::vector<std::string>& out,
                   std::set<std::string>& seen) {
  if (f->op == LtlOp::Atom) {
    if (seen.insert(f->atom).second) out.push_back(f->atom);
    return;
  }
  for (const auto& c : f->children) collect_atoms(c, out, seen);
}
}  // namespace

std::vector<std::string> atoms_of(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_atoms(f, out, seen);
  return out;
}

}  // namespace agsynth
