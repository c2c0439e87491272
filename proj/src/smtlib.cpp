#include "agsynth/smtlib.hpp"

#include <cctype>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

std::string smt_sort(const Sort& s) {
  if (s.is_bool()) return "Bool";
  return "(_ BitVec " + std::to_string(s.width) + ")";
}

namespace {

std::string bv_literal(uint64_t value, int width) {
  std::string s = "#b";
  for (int i = width - 1; i >= 0; --i) s += ((value >> i) & 1) ? '1' : '0';
  return s;
}

void render(const Term& t, std::ostringstream& out) {
  switch (t->op) {
    case TermOp::BoolConst: out << (t->bval ? "true" : "false"); return;
    case TermOp::BvConst: out << bv_literal(t->value, t->sort.width); return;
    case TermOp::Var: out << t->name; return;
    case TermOp::App: {
      if (t->args.empty()) { out << t->name; return; }
      out << "(" << t->name;
      for (const auto& a : t->args) { out << " "; render(a, out); }
      out << ")";
      return;
    }
    default: break;
  }
  const char* op = nullptr;
  switch (t->op) {
    case TermOp::Not: op = "not"; break;
    case TermOp::And: op = "and"; break;
    case TermOp::Or: op = "or"; break;
    case TermOp::Implies: op = "=>"; break;
    case TermOp::Eq: op = "="; break;
    case TermOp::Ite: op = "ite"; break;
    case TermOp::Uge: op = "bvuge"; break;
    case TermOp::Ugt: op = "bvugt"; break;
    case TermOp::Ult: op = "bvult"; break;
    case TermOp::Add: op = "bvadd"; break;
    case TermOp::Sub: op = "bvsub"; break;
    default: throw internal_error("unrenderable term");
  }
  out << "(" << op;
  for (const auto& a : t->args) { out << " "; render(a, out); }
  out << ")";
}

}  // namespace

std::string smt_term(const Term& t) {
  std::ostringstream out;
  render(t, out);
  return out.str();
}

std::string emit_script(const ConstraintSet& c) {
  std::ostringstream out;
  out << "; problem " << c.problem << " mode " << c.mode << " bound " << c.bound << "\n";
  out << "(set-option :produce-models true)\n";
  out << "(set-logic QF_UFBV)\n";
  for (const auto& d : c.decls) {
    out << "(declare-fun " << d.name << " (";
    for (size_t i = 0; i < d.args.size(); ++i)
      out << (i ? " " : "") << smt_sort(d.args[i]);
    out << ") " << smt_sort(d.result) << ")\n";
  }
  for (const auto& a : c.assertions) out << "(assert " << smt_term(a) << ")\n";
  out << "(check-sat)\n";
  for (const auto& h : c.model.holes) {
    for (uint64_t row = 0; row < h.rows(); ++row) {
      if (h.arg_bits > 0)
        out << "(get-value ((" << h.name << " " << bv_literal(row, h.arg_bits)
            << ")))\n";
      else
        out << "(get-value (" << h.name << "))\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Model value parsing: a tiny s-expression reader over the solver output.
// ---------------------------------------------------------------------------

namespace {

struct Sexp {
  std::string atom;
  std::vector<Sexp> kids;
  bool is_atom() const { return kids.empty() && !atom.empty(); }
};

struct SexpParser {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
      if (s[i] == ';') {  // comment to end of line
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      break;
    }
  }

  bool done() {
    skip_ws();
    return i >= s.size();
  }

  Sexp parse() {
    skip_ws();
    Sexp e;
    if (i >= s.size()) return e;
    if (s[i] == '(') {
      ++i;
      for (;;) {
        skip_ws();
        if (i >= s.size()) break;
        if (s[i] == ')') { ++i; break; }
        e.kids.push_back(parse());
      }
      return e;
    }
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
           s[j] != '(' && s[j] != ')')
      ++j;
    e.atom = s.substr(i, j - i);
    i = j;
    return e;
  }
};

bool parse_value_atom(const Sexp& e, uint64_t& out) {
  if (e.is_atom()) {
    const std::string& a = e.atom;
    if (a == "true") { out = 1; return true; }
    if (a == "false") { out = 0; return true; }
    if (a.rfind("#b", 0) == 0) {
      out = 0;
      for (size_t k = 2; k < a.size(); ++k) out = (out << 1) | (a[k] == '1');
      return true;
    }
    if (a.rfind("#x", 0) == 0) {
      out = std::stoull(a.substr(2), nullptr, 16);
      return true;
    }
    return false;
  }
  // (_ bvN w)
  if (e.kids.size() == 3 && e.kids[0].atom == "_" &&
      e.kids[1].atom.rfind("bv", 0) == 0) {
    out = std::stoull(e.kids[1].atom.substr(2));
    return true;
  }
  return false;
}

// ((f #b01) value) or (f value): extract name, packed args, value.
bool parse_binding(const Sexp& e,
                   std::map<std::pair<std::string, uint64_t>, uint64_t>& out) {
  if (e.kids.size() != 2) return false;
  const Sexp& app = e.kids[0];
  uint64_t value;
  if (!parse_value_atom(e.kids[1], value)) return false;
  if (app.is_atom()) {
    out[{app.atom, 0}] = value;
    return true;
  }
  if (app.kids.size() >= 1 && app.kids[0].is_atom()) {
    uint64_t packed = 0;
    for (size_t k = 1; k < app.kids.size(); ++k) {
      uint64_t arg;
      if (!parse_value_atom(app.kids[k], arg)) return false;
      // Widths are implicit; rows were queried with full-width literals, so
      // plain concatenation by shifting is recovered from the literal text.
      const std::string& a = app.kids[k].atom;
      int w = a.rfind("#b", 0) == 0 ? static_cast<int>(a.size()) - 2
              : a.rfind("#x", 0) == 0 ? static_cast<int>(a.size() - 2) * 4
                                      : 64;
      if (w >= 64 && app.kids.size() > 2)
        throw extraction_error("cannot reconstruct multi-argument row widths");
      packed = app.kids.size() == 2 ? arg : ((packed << w) | arg);
    }
    out[{app.kids[0].atom, packed}] = value;
    return true;
  }
  return false;
}

void collect_bindings(const Sexp& e,
                      std::map<std::pair<std::string, uint64_t>, uint64_t>& out) {
  if (parse_binding(e, out)) return;
  for (const auto& k : e.kids) collect_bindings(k, out);
}

}  // namespace

std::map<std::pair<std::string, uint64_t>, uint64_t> parse_model_values(
    const std::string& output) {
  std::map<std::pair<std::string, uint64_t>, uint64_t> out;
  SexpParser p{output};
  while (!p.done()) {
    Sexp e = p.parse();
    if (e.is_atom()) continue;  // sat/unsat/unknown tokens
    collect_bindings(e, out);
  }
  return out;
}

}  // namespace agsynth
