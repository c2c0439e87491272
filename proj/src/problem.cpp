#include "agsynth/problem.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

const Expr* ProcessDecl::assign_for(const std::string& var) const {
  for (const auto& [name, e] : assigns)
    if (name == var) return &e;
  return nullptr;
}

const VarDecl* SynthesisProblem::find_var(const std::string& n) const {
  for (const auto& v : vars)
    if (v.name == n) return &v;
  return nullptr;
}

const SignalDef* SynthesisProblem::find_signal(const std::string& n) const {
  for (const auto& s : signals)
    if (s.name == n) return &s;
  return nullptr;
}

const HoleDecl* SynthesisProblem::find_hole(const std::string& n) const {
  for (const auto& h : holes)
    if (h.name == n) return &h;
  return nullptr;
}

bool SynthesisProblem::is_controllable(const std::string& var) const {
  return hole_writing(var) != nullptr;
}

const HoleDecl* SynthesisProblem::hole_writing(const std::string& var) const {
  for (const auto& h : holes)
    for (const auto& o : h.outputs)
      if (o == var) return &h;
  return nullptr;
}

namespace {
bool owner_matches(Owner o, int process) {
  return o == Owner::Shared || (process == 1 ? o == Owner::P1 : o == Owner::P2);
}
}  // namespace

std::vector<std::string> SynthesisProblem::state_vars_of(int process) const {
  std::vector<std::string> out;
  for (const auto& v : vars)
    if (v.kind == VarKind::State && owner_matches(v.owner, process)) out.push_back(v.name);
  return out;
}

std::vector<std::string> SynthesisProblem::foreign_state_of(int process) const {
  std::vector<std::string> out;
  for (const auto& v : vars)
    if (v.kind == VarKind::State && v.owner != Owner::Shared &&
        !owner_matches(v.owner, process))
      out.push_back(v.name);
  return out;
}

std::vector<std::string> SynthesisProblem::input_vars_of(int process) const {
  std::vector<std::string> out;
  for (const auto& v : vars)
    if (v.kind == VarKind::Input && owner_matches(v.owner, process)) out.push_back(v.name);
  return out;
}

std::vector<std::string> SynthesisProblem::all_signal_names() const {
  std::vector<std::string> out;
  for (const auto& s : signals) out.push_back(s.name);
  out.push_back("sched_p1");
  out.push_back("sched_p2");
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Splits "a, b , c" into identifiers.
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      std::string t = trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

uint64_t parse_const(const std::string& s, int line_no) {
  if (s == "true" || s == "T") return 1;
  if (s == "false" || s == "F") return 0;
  try {
    size_t used = 0;
    uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected constant, got '" + s + "'", line_no, 1);
  }
}

struct RawStatement {
  int line_no;
  std::string text;
};

// Joins physical lines into statements; a trans statement spans until its
// closing brace.
std::vector<RawStatement> split_statements(const std::string& text) {
  std::vector<RawStatement> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int pending_line = 0;
  std::string pending;
  int depth = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = strip_comment(line);
    if (trim(s).empty() && depth == 0) continue;
    if (depth == 0) {
      pending = s;
      pending_line = line_no;
    } else {
      pending += "\n" + s;
    }
    for (char c : s) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
    }
    if (depth < 0) throw parse_error("unmatched '}'", line_no, 1);
    if (depth == 0 && !trim(pending).empty()) {
      out.push_back({pending_line, trim(pending)});
      pending.clear();
    }
  }
  if (depth != 0) throw parse_error("unterminated '{' block", pending_line, 1);
  return out;
}

int parse_proc(const std::string& w, int line_no) {
  if (w == "p1") return 1;
  if (w == "p2") return 2;
  throw parse_error("expected p1 or p2, got '" + w + "'", line_no, 1);
}

struct ParsedSpec {
  int process;
  std::string text;
};

}  // namespace

SynthesisProblem parse_problem(const std::string& text) {
  SynthesisProblem p;
  std::vector<ParsedSpec> spec_texts;
  std::vector<std::pair<std::string, uint64_t>> init_line;
  std::vector<std::tuple<std::string, std::string, std::string, int>> raw_costs;
  bool saw_spec[2] = {false, false};

  for (const auto& st : split_statements(text)) {
    auto words = split_words(st.text);
    if (words.empty()) continue;
    const std::string& kw = words[0];
    int ln = st.line_no;

    if (kw == "problem") {
      if (words.size() != 2) throw parse_error("expected: problem <id>", ln, 1);
      p.name = words[1];
    } else if (kw == "var") {
      // var <name> : bool|uint<k> <state|input> <p1|p2|shared> [init <const>]
      if (words.size() < 6 || words[2] != ":")
        throw parse_error("expected: var <name> : <type> <state|input> <p1|p2|shared>",
                          ln, 1);
      VarDecl v;
      v.name = words[1];
      const std::string& ty = words[3];
      if (ty == "bool") {
        v.width = 1;
      } else if (ty.rfind("uint", 0) == 0) {
        try {
          v.width = std::stoi(ty.substr(4));
        } catch (const std::exception&) {
          throw parse_error("bad type '" + ty + "'", ln, 1);
        }
        if (v.width < 2 || v.width > 62)
          throw parse_error("uint width must be in 2..62 (use bool for one bit)", ln, 1);
      } else {
        throw parse_error("bad type '" + ty + "'", ln, 1);
      }
      if (words[4] == "state") v.kind = VarKind::State;
      else if (words[4] == "input") v.kind = VarKind::Input;
      else throw parse_error("expected state or input, got '" + words[4] + "'", ln, 1);
      if (words[5] == "p1") v.owner = Owner::P1;
      else if (words[5] == "p2") v.owner = Owner::P2;
      else if (words[5] == "shared") v.owner = Owner::Shared;
      else throw parse_error("expected p1, p2 or shared, got '" + words[5] + "'", ln, 1);
      if (words.size() >= 8 && words[6] == "init") {
        v.init = parse_const(words[7], ln);
        v.has_init = true;
      } else if (words.size() != 6) {
        throw parse_error("trailing tokens after var declaration", ln, 1);
      }
      p.vars.push_back(std::move(v));
    } else if (kw == "hole") {
      // hole <name> of <proc> outputs <vars> [observes <vars>]
      size_t pos_of = st.text.find(" of ");
      size_t pos_out = st.text.find(" outputs ");
      size_t pos_obs = st.text.find(" observes");
      if (pos_of == std::string::npos || pos_out == std::string::npos)
        throw parse_error("expected: hole <name> of <p1|p2> outputs <vars> observes <vars>",
                          ln, 1);
      HoleDecl h;
      h.name = trim(st.text.substr(5, pos_of - 5));
      h.process = parse_proc(trim(st.text.substr(pos_of + 4, pos_out - pos_of - 4)), ln);
      std::string outs =
          pos_obs == std::string::npos
              ? st.text.substr(pos_out + 9)
              : st.text.substr(pos_out + 9, pos_obs - pos_out - 9);
      h.outputs = split_list(outs);
      if (pos_obs != std::string::npos)
        h.observes = split_list(st.text.substr(pos_obs + 9));
      if (h.outputs.empty()) throw parse_error("hole needs at least one output", ln, 1);
      p.holes.push_back(std::move(h));
    } else if (kw == "memory") {
      // memory of <p1|p2> bits M [shared] observes <vars>
      if (words.size() < 5 || words[1] != "of" || words[3] != "bits" || words[4] != "M")
        throw parse_error("expected: memory of <p1|p2> bits M [shared] observes <vars>",
                          ln, 1);
      int proc = parse_proc(words[2], ln);
      MemoryDecl& md = p.memory[proc - 1];
      if (md.declared) throw semantic_error("duplicate memory declaration for p" +
                                            std::to_string(proc));
      md.declared = true;
      size_t idx = 5;
      if (idx < words.size() && words[idx] == "shared") {
        md.shared = true;
        ++idx;
      }
      if (idx < words.size()) {
        if (words[idx] != "observes")
          throw parse_error("expected 'observes', got '" + words[idx] + "'", ln, 1);
        size_t pos = st.text.find(" observes");
        md.observes = split_list(st.text.substr(pos + 9));
      }
    } else if (kw == "signal") {
      size_t pos = st.text.find(":=");
      if (pos == std::string::npos || words.size() < 2)
        throw parse_error("expected: signal <name> := <expr>", ln, 1);
      SignalDef s;
      s.name = words[1];
      s.implicit = false;
      try {
        s.def = parse_expr(st.text.substr(pos + 2));
      } catch (parse_error& e) {
        throw parse_error(std::string(e.what()), ln, e.col);
      }
      p.signals.push_back(std::move(s));
    } else if (kw == "trans") {
      size_t open = st.text.find('{');
      size_t close = st.text.rfind('}');
      if (words.size() < 2 || open == std::string::npos || close == std::string::npos)
        throw parse_error("expected: trans <p1|p2> { <var>' := <expr> ; ... }", ln, 1);
      int proc = parse_proc(words[1], ln);
      std::string body = st.text.substr(open + 1, close - open - 1);
      // Statements separated by ';' or newlines.
      std::string norm;
      for (char c : body) norm += (c == '\n') ? ';' : c;
      for (const auto& stmt_raw : [&] {
             std::vector<std::string> parts;
             std::string cur;
             for (char c : norm + ";") {
               if (c == ';') {
                 parts.push_back(cur);
                 cur.clear();
               } else cur += c;
             }
             return parts;
           }()) {
        std::string stmt = trim(stmt_raw);
        if (stmt.empty()) continue;
        size_t pos = stmt.find(":=");
        if (pos == std::string::npos)
          throw parse_error("expected <var>' := <expr> in trans block", ln, 1);
        std::string lhs = trim(stmt.substr(0, pos));
        if (lhs.size() < 2 || lhs.back() != '\'')
          throw parse_error("left-hand side must be a primed variable: '" + lhs + "'",
                            ln, 1);
        lhs.pop_back();
        lhs = trim(lhs);
        Expr rhs;
        try {
          rhs = parse_expr(stmt.substr(pos + 2));
        } catch (parse_error& e) {
          throw parse_error(std::string(e.what()), ln, e.col);
        }
        auto& proc_decl = p.procs[proc - 1];
        if (proc_decl.assign_for(lhs))
          throw semantic_error("duplicate assignment to '" + lhs + "' in trans p" +
                               std::to_string(proc));
        proc_decl.assigns.emplace_back(lhs, rhs);
      }
    } else if (kw == "spec") {
      size_t q1 = st.text.find('"');
      size_t q2 = st.text.rfind('"');
      if (words.size() < 3 || q1 == std::string::npos || q2 <= q1)
        throw parse_error("expected: spec <p1|p2> \"<LTL>\"", ln, 1);
      int proc = parse_proc(words[1], ln);
      if (saw_spec[proc - 1])
        throw semantic_error("duplicate spec for p" + std::to_string(proc));
      saw_spec[proc - 1] = true;
      spec_texts.push_back({proc, st.text.substr(q1 + 1, q2 - q1 - 1)});
    } else if (kw == "cost") {
      // cost <name> := count <hole> where <pred> weight <int>
      size_t pos_assign = st.text.find(":=");
      size_t pos_count = st.text.find("count", pos_assign);
      size_t pos_where = st.text.find(" where ");
      size_t pos_weight = st.text.rfind(" weight ");
      if (pos_assign == std::string::npos || pos_count == std::string::npos ||
          pos_where == std::string::npos || pos_weight == std::string::npos ||
          pos_weight < pos_where)
        throw parse_error(
            "expected: cost <name> := count <hole> where <pred> weight <int>", ln, 1);
      std::string name = trim(st.text.substr(5, pos_assign - 5));
      std::string hole = trim(st.text.substr(pos_count + 5, pos_where - pos_count - 5));
      std::string pred = st.text.substr(pos_where + 7, pos_weight - pos_where - 7);
      int weight = static_cast<int>(parse_const(trim(st.text.substr(pos_weight + 8)), ln));
      raw_costs.emplace_back(name, hole, pred, weight);
    } else if (kw == "init") {
      for (const auto& item : split_list(st.text.substr(4))) {
        size_t eq = item.find('=');
        if (eq == std::string::npos)
          throw parse_error("expected <var>=<const> in init line", ln, 1);
        init_line.emplace_back(trim(item.substr(0, eq)),
                               parse_const(trim(item.substr(eq + 1)), ln));
      }
    } else {
      throw parse_error("unknown directive '" + kw + "'", ln, 1);
    }
  }

  // Implicit scheduling variable.
  if (p.find_var(kSchedVar))
    throw semantic_error("variable name 'sched' is reserved for the scheduler");
  p.vars.push_back({kSchedVar, 1, Owner::Shared, VarKind::Input, 0, false});

  // Name uniqueness across vars, signals and holes.
  {
    std::set<std::string> names;
    for (const auto& v : p.vars)
      if (!names.insert(v.name).second)
        throw semantic_error("duplicate name '" + v.name + "'");
    for (const auto& s : p.signals)
      if (!names.insert(s.name).second)
        throw semantic_error("duplicate name '" + s.name + "'");
    for (const auto& h : p.holes)
      if (!names.insert(h.name).second)
        throw semantic_error("duplicate name '" + h.name + "'");
    if (names.count("mem")) throw semantic_error("the name 'mem' is reserved");
  }

  // Apply the init line, then check init presence.
  for (const auto& [name, value] : init_line) {
    auto* v = const_cast<VarDecl*>(p.find_var(name));
    if (!v) throw semantic_error("init for undeclared variable '" + name + "'");
    v->init = value;
    v->has_init = true;
  }
  for (auto& v : p.vars) {
    if (v.kind == VarKind::Input) {
      if (v.has_init && v.name != kSchedVar)
        throw semantic_error("input '" + v.name + "' must not carry an initial value");
      continue;
    }
    if (!v.has_init)
      throw semantic_error("state variable '" + v.name + "' has no initial value");
    if (v.width < 64 && (v.init >> v.width) != 0)
      throw semantic_error("initial value of '" + v.name + "' exceeds its width");
  }

  // Hole outputs: declared controllable inputs of the owning process, each
  // owned by exactly one hole.
  {
    std::set<std::string> owned;
    for (const auto& h : p.holes) {
      for (const auto& o : h.outputs) {
        const VarDecl* v = p.find_var(o);
        if (!v) throw semantic_error("hole '" + h.name + "' outputs undeclared '" + o + "'");
        if (v->kind != VarKind::Input || v->owner == Owner::Shared ||
            !owner_matches(v->owner, h.process))
          throw semantic_error("hole '" + h.name + "' output '" + o +
                               "' must be an input variable of p" +
                               std::to_string(h.process));
        if (!owned.insert(o).second)
          throw semantic_error("controllable input '" + o + "' is owned by two holes");
      }
    }
  }

  // Implicit signals: every width-1 non-memory variable except sched.
  {
    std::set<std::string> have;
    for (const auto& s : p.signals) have.insert(s.name);
    for (const auto& v : p.vars) {
      if (v.width != 1 || v.name == kSchedVar || have.count(v.name)) continue;
      SignalDef s;
      s.name = v.name;
      s.def = parse_expr(v.name);
      s.implicit = true;
      p.signals.push_back(std::move(s));
    }
  }

  // Width resolution: signals first (each may use vars and earlier signals).
  for (size_t i = 0; i < p.signals.size(); ++i) {
    auto& sig = p.signals[i];
    auto lookup = [&](const std::string& n) -> int {
      if (n.rfind('?', 0) == 0)
        throw semantic_error("signal '" + sig.name + "' references a hole");
      if (const VarDecl* v = p.find_var(n)) return v->width;
      for (size_t j = 0; j < i; ++j)
        if (p.signals[j].name == n) return 1;
      throw semantic_error("signal '" + sig.name + "' references unknown '" + n + "'");
    };
    resolve_widths(sig.def, lookup, 1);
  }

  // Transition assignments.
  for (int proc = 1; proc <= 2; ++proc) {
    std::set<std::string> assigned;
    for (auto& [lhs, rhs] : p.procs[proc - 1].assigns) {
      const VarDecl* v = p.find_var(lhs);
      if (!v) throw semantic_error("assignment to undeclared variable '" + lhs + "'");
      if (v->kind != VarKind::State)
        throw semantic_error("assignment to input variable '" + lhs + "'");
      if (!owner_matches(v->owner, proc))
        throw semantic_error("p" + std::to_string(proc) + " must not assign foreign '" +
                             lhs + "'");
      assigned.insert(lhs);
      auto lookup = [&](const std::string& n) -> int {
        if (n.rfind('?', 0) == 0) {
          std::string hname = n.substr(1);
          const HoleDecl* h = p.find_hole(hname);
          if (!h || h->process != proc)
            throw semantic_error("trans p" + std::to_string(proc) +
                                 " references foreign or unknown hole '?" + hname + "'");
          if (h->outputs.size() != 1)
            throw semantic_error("'?" + hname + "' needs exactly one output variable");
          return p.find_var(h->outputs[0])->width;
        }
        if (const VarDecl* vv = p.find_var(n)) {
          if (vv->kind == VarKind::Input && vv->owner != Owner::Shared &&
              !owner_matches(vv->owner, proc))
            throw semantic_error("trans p" + std::to_string(proc) +
                                 " reads foreign input '" + n + "' (use a signal)");
          return vv->width;
        }
        if (p.find_signal(n)) return 1;
        throw semantic_error("trans references unknown name '" + n + "'");
      };
      resolve_widths(rhs, lookup, v->width);
    }
    // Every owned state variable needs exactly one assignment.
    for (const auto& v : p.vars) {
      if (v.kind != VarKind::State) continue;
      bool owned = (proc == 1 && v.owner == Owner::P1) || (proc == 2 && v.owner == Owner::P2);
      if (owned && !assigned.count(v.name))
        throw semantic_error("state variable '" + v.name + "' of p" +
                             std::to_string(proc) + " has no transition assignment");
    }
  }

  // Observation lists: items must be own state, foreign state, shared state,
  // own uncontrollable inputs, 'mem', 'sched' (explicit opt-in), or a signal
  // whose free variables satisfy the same restriction.
  auto check_obs = [&](const std::string& who, int proc, const std::vector<std::string>& obs,
                       bool has_mem_decl) {
    for (const auto& o : obs) {
      if (o == "mem") {
        if (!has_mem_decl)
          throw semantic_error(who + " observes 'mem' but p" + std::to_string(proc) +
                               " declares no memory");
        continue;
      }
      auto check_var = [&](const std::string& n, const std::string& via) {
        const VarDecl* v = p.find_var(n);
        if (!v) throw semantic_error(who + " observes unknown '" + n + "'" + via);
        if (v->kind == VarKind::Input) {
          if (n == kSchedVar && via.empty()) return;  // explicit opt-in only
          if (v->owner == Owner::Shared && n != kSchedVar) return;
          if (!owner_matches(v->owner, proc) || p.is_controllable(n) || n == kSchedVar)
            throw semantic_error(who + " must not observe '" + n + "'" + via);
        }
      };
      if (p.find_var(o)) {
        check_var(o, "");
      } else if (const SignalDef* sd = p.find_signal(o)) {
        for (const auto& fv : expr_vars(sd->def))
          if (p.find_var(fv)) check_var(fv, " (via signal '" + o + "')");
      } else {
        throw semantic_error(who + " observes unknown '" + o + "'");
      }
    }
  };
  for (const auto& h : p.holes)
    check_obs("hole '" + h.name + "'", h.process, h.observes,
              p.memory[h.process - 1].declared);
  for (int proc = 1; proc <= 2; ++proc)
    if (p.memory[proc - 1].declared)
      check_obs("memory of p" + std::to_string(proc), proc, p.memory[proc - 1].observes,
                true);
  if (p.memory[0].declared && p.memory[1].declared &&
      p.memory[0].shared != p.memory[1].shared)
    throw semantic_error("memory sharing flags of p1 and p2 disagree");

  // Specs.
  for (const auto& ps : spec_texts) {
    Formula f = parse_ltl(ps.text, p.all_signal_names());
    p.spec[ps.process - 1] = f;
  }
  if (!p.spec[0]) p.spec[0] = mk_true();
  if (!p.spec[1]) p.spec[1] = mk_true();

  // Costs: predicate names checked here, widths resolved at grounding time
  // (mem width depends on the bound).
  for (auto& [name, hole, pred, weight] : raw_costs) {
    CostDecl c;
    c.name = name;
    c.hole = hole;
    c.weight = weight;
    bool is_mu = hole == "mu_p1" || hole == "mu_p2";
    if (is_mu) {
      int proc = hole == "mu_p1" ? 1 : 2;
      if (!p.memory[proc - 1].declared)
        throw semantic_error("cost '" + name + "' counts '" + hole +
                             "' but p" + std::to_string(proc) + " declares no memory");
    } else if (!p.find_hole(hole)) {
      throw semantic_error("cost '" + name + "' counts unknown hole '" + hole + "'");
    }
    try {
      c.pred = parse_expr(pred);
    } catch (parse_error& e) {
      throw semantic_error("cost '" + name + "': " + e.what());
    }
    const std::vector<std::string> obs =
        is_mu ? p.memory[(hole == "mu_p1" ? 0 : 1)].observes : p.find_hole(hole)->observes;
    for (const auto& n : expr_vars(c.pred)) {
      if (std::find(obs.begin(), obs.end(), n) == obs.end())
        throw semantic_error("cost '" + name + "' predicate reads '" + n +
                             "' outside the hole's observation list");
    }
    for (const auto& hn : expr_holes(c.pred))
      if (hn != hole)
        throw semantic_error("cost '" + name + "' predicate references foreign hole '?" +
                             hn + "'");
    p.costs.push_back(std::move(c));
  }

  if (p.name.empty()) throw semantic_error("missing 'problem <id>' directive");
  return p;
}

// ---------------------------------------------------------------------------
// Rendering (canonical form; init values are kept on the var declarations)
// ---------------------------------------------------------------------------

std::string render_problem(const SynthesisProblem& p) {
  std::ostringstream out;
  out << "problem " << p.name << "\n";
  for (const auto& v : p.vars) {
    if (v.name == kSchedVar) continue;
    out << "var " << v.name << " : "
        << (v.width == 1 ? std::string("bool") : "uint" + std::to_string(v.width)) << " "
        << (v.kind == VarKind::State ? "state" : "input") << " "
        << (v.owner == Owner::P1 ? "p1" : v.owner == Owner::P2 ? "p2" : "shared");
    if (v.kind == VarKind::State) out << " init " << v.init;
    out << "\n";
  }
  for (const auto& h : p.holes) {
    out << "hole " << h.name << " of p" << h.process << " outputs ";
    for (size_t i = 0; i < h.outputs.size(); ++i) out << (i ? ", " : "") << h.outputs[i];
    out << " observes";
    for (size_t i = 0; i < h.observes.size(); ++i)
      out << (i ? ", " : " ") << h.observes[i];
    out << "\n";
  }
  for (int proc = 1; proc <= 2; ++proc) {
    const auto& md = p.memory[proc - 1];
    if (!md.declared) continue;
    out << "memory of p" << proc << " bits M" << (md.shared ? " shared" : "")
        << " observes";
    for (size_t i = 0; i < md.observes.size(); ++i)
      out << (i ? ", " : " ") << md.observes[i];
    out << "\n";
  }
  for (const auto& s : p.signals)
    if (!s.implicit) out << "signal " << s.name << " := " << to_string(s.def) << "\n";
  for (int proc = 1; proc <= 2; ++proc) {
    const auto& assigns = p.procs[proc - 1].assigns;
    if (assigns.empty()) continue;
    out << "trans p" << proc << " {\n";
    for (const auto& [lhs, rhs] : assigns)
      out << "  " << lhs << "' := " << to_string(rhs) << ";\n";
    out << "}\n";
  }
  for (int proc = 1; proc <= 2; ++proc)
    out << "spec p" << proc << " \"" << to_string(p.spec[proc - 1]) << "\"\n";
  for (const auto& c : p.costs)
    out << "cost " << c.name << " := count " << c.hole << " where " << to_string(c.pred)
        << " weight " << c.weight << "\n";
  return out.str();
}

bool same_problem(const SynthesisProblem& a, const SynthesisProblem& b) {
  return render_problem(a) == render_problem(b);
}

// ---------------------------------------------------------------------------
// Grounding at a memory bound
// ---------------------------------------------------------------------------

const GroundHole* GroundModel::find_hole(const std::string& n) const {
  for (const auto& h : holes)
    if (h.name == n) return &h;
  return nullptr;
}

std::vector<std::string> GroundModel::mem_vars_of(int process) const {
  std::vector<std::string> out;
  if (!prob->memory[process - 1].declared) return out;
  for (const auto& v : mem_vars)
    if (owner_matches(v.owner, process)) out.push_back(v.name);
  return out;
}

DomainPtr GroundModel::ext_dom_for(const std::vector<int>& refined) const {
  std::vector<std::pair<std::string, int>> vars;
  for (const auto& s : state_dom->slots()) vars.emplace_back(s.name, s.width);
  std::set<std::string> seen;
  for (int proc : refined)
    for (const auto& mv : mem_vars_of(proc))
      if (seen.insert(mv).second) vars.emplace_back(mv, 1);
  return make_domain(vars);
}

Valuation GroundModel::initial_ext() const {
  Valuation v(ext_dom);
  for (const auto& vd : prob->vars)
    if (vd.kind == VarKind::State) v.set(vd.name, vd.init);
  return v;  // memory bits default to false
}

GroundModel ground(const SynthesisProblem& p, int bound) {
  if (bound < 0) throw semantic_error("negative memory bound");
  GroundModel m;
  m.prob = std::make_shared<const SynthesisProblem>(p);
  m.bound = bound;

  bool shared_mem = (p.memory[0].declared && p.memory[0].shared) ||
                    (p.memory[1].declared && p.memory[1].shared);
  if (bound > 0) {
    if (shared_mem) {
      for (int k = 0; k < bound; ++k)
        m.mem_vars.push_back({"m_" + std::to_string(k), 1, Owner::Shared,
                              VarKind::State, 0, true});
    } else {
      for (int proc = 1; proc <= 2; ++proc) {
        if (!p.memory[proc - 1].declared) continue;
        for (int k = 0; k < bound; ++k)
          m.mem_vars.push_back({"m" + std::to_string(proc) + "_" + std::to_string(k), 1,
                                proc == 1 ? Owner::P1 : Owner::P2, VarKind::State, 0,
                                true});
      }
    }
  }

  auto obs_args = [&](int proc, const std::vector<std::string>& obs) {
    std::vector<ObsArg> args;
    for (const auto& o : obs) {
      if (o == "mem") {
        if (bound > 0) args.push_back({"mem", bound});
        continue;  // dropped at b = 0
      }
      if (const VarDecl* v = p.find_var(o)) args.push_back({o, v->width});
      else args.push_back({o, 1});  // signal
    }
    (void)proc;
    return args;
  };

  for (const auto& h : p.holes) {
    GroundHole g;
    g.name = h.name;
    g.process = h.process;
    g.role = HoleRole::Control;
    g.args = obs_args(h.process, h.observes);
    for (const auto& o : h.outputs) g.outputs.emplace_back(o, p.find_var(o)->width);
    for (const auto& a : g.args) g.arg_bits += a.width;
    for (const auto& [_, w] : g.outputs) g.out_width += w;
    if (g.arg_bits > 16)
      throw budget_error("hole '" + g.name + "' observes " + std::to_string(g.arg_bits) +
                         " bits; the table would be too large");
    m.holes.push_back(std::move(g));
  }
  if (bound > 0) {
    for (int proc = 1; proc <= 2; ++proc) {
      if (!p.memory[proc - 1].declared) continue;
      GroundHole g;
      g.name = "mu_p" + std::to_string(proc);
      g.process = proc;
      g.role = HoleRole::MemoryUpdate;
      g.args = obs_args(proc, p.memory[proc - 1].observes);
      g.outputs.emplace_back("mem", bound);
      for (const auto& a : g.args) g.arg_bits += a.width;
      g.out_width = bound;
      if (g.arg_bits > 16)
        throw budget_error("memory update of p" + std::to_string(proc) + " observes " +
                           std::to_string(g.arg_bits) + " bits");
      m.holes.push_back(std::move(g));
    }
  }

  // Cost predicates: widths depend on the bound through 'mem'.
  for (const auto& c : p.costs) {
    const GroundHole* h = m.find_hole(c.hole);
    if (!h) continue;  // memory-update cost at b = 0
    CostDecl rc = c;
    rc.pred = clone_expr(c.pred);
    auto lookup = [&](const std::string& n) -> int {
      if (n.rfind('?', 0) == 0) {
        if (n.substr(1) != h->name)
          throw semantic_error("cost predicate references foreign hole '" + n + "'");
        return h->out_width;
      }
      for (const auto& a : h->args)
        if (a.name == n) return a.width;
      throw semantic_error("cost '" + c.name + "' predicate reads '" + n +
                           "' outside the observation list");
    };
    resolve_widths(rc.pred, lookup, 1);
    m.costs.push_back(std::move(rc));
  }

  std::vector<std::pair<std::string, int>> state, ext, unctrl, ctrl;
  for (const auto& v : p.vars) {
    if (v.kind == VarKind::State) {
      state.emplace_back(v.name, v.width);
      ext.emplace_back(v.name, v.width);
    }
  }
  for (const auto& v : m.mem_vars) ext.emplace_back(v.name, v.width);
  for (const auto& v : p.vars) {
    if (v.kind != VarKind::Input) continue;
    if (p.is_controllable(v.name)) ctrl.emplace_back(v.name, v.width);
    else if (v.name != kSchedVar) unctrl.emplace_back(v.name, v.width);
  }
  unctrl.emplace_back(kSchedVar, 1);
  m.state_dom = make_domain(state);
  m.ext_dom = make_domain(ext);
  m.unctrl_input_dom = make_domain(unctrl);
  m.ctrl_dom = make_domain(ctrl);
  auto step_vars = ext;
  step_vars.insert(step_vars.end(), unctrl.begin(), unctrl.end());
  m.step_dom = make_domain(step_vars);
  return m;
}

// ---------------------------------------------------------------------------
// Execution semantics
// ---------------------------------------------------------------------------

uint64_t StrategyTables::lookup(const std::string& hole, uint64_t row) const {
  auto it = tables.find(hole);
  if (it == tables.end())
    throw semantic_error("no strategy table for hole '" + hole + "'");
  if (row >= it->second.rows.size())
    throw internal_error("table row out of range for '" + hole + "'");
  return it->second.rows[row];
}

namespace {

// Shared resolution logic for concrete environments; signals and hole
// outputs are computed on demand.
struct ConcreteEnv {
  const GroundModel& m;
  const StrategyTables* t;
  Valuation g;  // by value: the environment may outlive the caller's copy

  SVal var(const std::string& name) const {
    if (g.domain()->contains(name))
      return SVal::of(g.get(name), g.domain()->slot(name).width);
    if (const VarDecl* v = m.prob->find_var(name)) {
      if (v->kind == VarKind::Input && m.prob->is_controllable(name))
        return ctrl_value(name, *v);
      throw semantic_error("valuation does not cover variable '" + name + "'");
    }
    if (const SignalDef* s = m.prob->find_signal(name))
      return eval_expr(s->def, as_env());
    throw semantic_error("unknown name '" + name + "'");
  }

  SVal ctrl_value(const std::string& name, const VarDecl& v) const {
    const HoleDecl* hd = m.prob->hole_writing(name);
    const GroundHole* h = m.find_hole(hd->name);
    uint64_t packed = hole_value(*h);
    // Slice this output out of the packed hole value (first output highest).
    int off = h->out_width;
    for (const auto& [on, ow] : h->outputs) {
      off -= ow;
      if (on == name)
        return SVal::of((packed >> off) & ((uint64_t(1) << ow) - 1), v.width);
    }
    throw internal_error("output slice not found for '" + name + "'");
  }

  uint64_t hole_value(const GroundHole& h) const {
    if (!t) throw semantic_error("unresolved hole '" + h.name + "' (no tables)");
    return t->lookup(h.name, hole_row(m, h, as_env()));
  }

  SVal hole(const std::string& name) const {
    const GroundHole* h = m.find_hole(name);
    if (!h) throw semantic_error("unknown hole '?" + name + "'");
    return SVal::of(hole_value(*h), h->out_width);
  }

  EvalEnv as_env() const {
    EvalEnv e;
    e.var = [this](const std::string& n) { return var(n); };
    if (t) e.hole = [this](const std::string& n) { return hole(n); };
    return e;
  }
};

}  // namespace

EvalEnv make_concrete_env(const GroundModel& m, const StrategyTables* t,
                          const Valuation& g) {
  auto env = std::make_shared<ConcreteEnv>(ConcreteEnv{m, t, g});
  EvalEnv e;
  e.var = [env](const std::string& n) { return env->var(n); };
  if (t) e.hole = [env](const std::string& n) { return env->hole(n); };
  return e;
}

uint64_t hole_row(const GroundModel& m, const GroundHole& h, const EvalEnv& env) {
  uint64_t packed = 0;
  for (const auto& a : h.args) {
    uint64_t v;
    if (a.name == "mem") {
      v = 0;
      for (const auto& mv : m.mem_vars_of(h.process)) {
        SVal s = env.var(mv);
        if (!s.concrete) throw internal_error("symbolic memory in hole_row");
        v = (v << 1) | s.bits;
      }
    } else {
      SVal s = env.var(a.name);
      if (!s.concrete) throw internal_error("symbolic observation in hole_row");
      v = s.bits;
    }
    packed = (packed << a.width) | (v & ((uint64_t(1) << a.width) - 1));
  }
  return packed;
}

Valuation step(const GroundModel& m, const StrategyTables& t, const Valuation& g) {
  int proc = g.get(kSchedVar) ? 1 : 2;
  EvalEnv env = make_concrete_env(m, &t, g);

  Valuation next(m.ext_dom);
  for (const auto& s : m.ext_dom->slots()) next.set(s.name, g.get(s.name));

  // State updates of the scheduled process; unassigned shared variables and
  // everything of the other process stay frozen.
  for (const auto& v : m.prob->vars) {
    if (v.kind != VarKind::State) continue;
    if (!owner_matches(v.owner, proc)) continue;
    if (const Expr* e = m.prob->procs[proc - 1].assign_for(v.name))
      next.set(v.name, eval_expr_concrete(*e, env));
  }

  // Memory update through the scheduled process's update hole.
  auto mems = m.mem_vars_of(proc);
  if (!mems.empty()) {
    const GroundHole* mu = m.find_hole("mu_p" + std::to_string(proc));
    uint64_t out = t.lookup(mu->name, hole_row(m, *mu, env));
    int off = static_cast<int>(mems.size());
    for (const auto& mv : mems) {
      --off;
      next.set(mv, (out >> off) & 1);
    }
  }
  return next;
}

SignalValuation signals_of(const GroundModel& m, const StrategyTables* t,
                           const Valuation& g) {
  EvalEnv env = make_concrete_env(m, t, g);
  SignalValuation out;
  for (const auto& s : m.prob->signals)
    out[s.name] = eval_expr_concrete(s.def, env) != 0;
  bool sched = g.get(kSchedVar) != 0;
  out["sched_p1"] = sched;
  out["sched_p2"] = !sched;
  return out;
}

}  // namespace agsynth
