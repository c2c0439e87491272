#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "agsynth/encoder.hpp"
#include "agsynth/errors.hpp"
#include "agsynth/smtlib.hpp"
#include "agsynth/solver.hpp"

using namespace agsynth;

namespace {

std::string bench(const std::string& name) {
  const char* root = std::getenv("AGSYNTH_ROOT");
  REQUIRE(root != nullptr);
  std::ifstream in(std::string(root) + "/benchmarks/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One toggling process, one hole that can keep the spec or break it.
SynthesisProblem toggle_problem(const std::string& spec1) {
  return parse_problem(
      "problem toggle\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c : bool input p1\n"
      "hole h of p1 outputs c observes x\n"
      "trans p1 { x' := ite(?h, !x, x); }\n"
      "trans p2 { y' := y; }\n"
      "spec p1 \"" + spec1 + "\"\n"
      "spec p2 \"true\"\n");
}

}  // namespace

TEST_CASE("spec false is unsatisfiable, spec true satisfiable") {
  SynthesisProblem p = toggle_problem("false");
  GroundModel m = ground(p, 0);
  ConstraintSet c = encode_mode(m, Mode::Cooperative);
  CHECK(enumerative_check_sat(c).status == SolveStatus::Unsat);

  SynthesisProblem pt = toggle_problem("true");
  ConstraintSet ct = encode_mode(ground(pt, 0), Mode::Cooperative);
  CHECK(enumerative_check_sat(ct).status == SolveStatus::Sat);
}

TEST_CASE("toggle realizability depends on the hole") {
  // G F x under fairness requires the hole to toggle; x stays 0 otherwise.
  SynthesisProblem p = toggle_problem("G F x & G F !x");
  ConstraintSet c = encode_mode(ground(p, 0), Mode::Cooperative);
  SolverResult r = enumerative_check_sat(c);
  REQUIRE(r.status == SolveStatus::Sat);
  StrategyTables t = extract_tables(r, c);
  CHECK(t.lookup("h", 0) == 1);  // toggle from x=0
  CHECK(t.lookup("h", 1) == 1);  // and from x=1

  // G !x is realizable by never toggling.
  ConstraintSet c2 = encode_mode(ground(toggle_problem("G !x"), 0), Mode::Cooperative);
  SolverResult r2 = enumerative_check_sat(c2);
  REQUIRE(r2.status == SolveStatus::Sat);
  CHECK(extract_tables(r2, c2).lookup("h", 0) == 0);
}

TEST_CASE("product domain sizing: peterson is 2^7") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  Formula spec = mk_implies(fair_formula(), mk_and(p.spec[0], p.spec[1]));
  ProductDomain d = build_product_domain(m, spec);
  CHECK(d.ext_valuations.size() == 128);  // 7 state bits
  CHECK(d.rank_bound == uint64_t(d.automaton.num_states) * 128 + 1);
  CHECK(d.initial_x.get("pc1") == 0);
  // b=1 with disjoint memory multiplies the space by 4.
  SynthesisProblem pm = parse_problem(
      "problem m\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "memory of p1 bits M observes mem\n"
      "memory of p2 bits M observes mem\n"
      "trans p1 { x' := x; }\n"
      "trans p2 { y' := y; }\n");
  CHECK(build_product_domain(ground(pm, 0), mk_true()).ext_valuations.size() == 4);
  CHECK(build_product_domain(ground(pm, 1), mk_true()).ext_valuations.size() == 16);
}

TEST_CASE("ags instances share hole symbols, annotation symbols distinct") {
  SynthesisProblem p = toggle_problem("G F x & G F !x");
  ConstraintSet c = encode_mode(ground(p, 0), Mode::Ags);
  REQUIRE(c.instances.size() == 3);
  int holes = 0, reach = 0, rank = 0;
  std::set<std::string> names;
  for (const auto& d : c.decls) {
    CHECK(names.insert(d.name).second);  // declared exactly once
    if (d.kind == FnDecl::Kind::Hole) ++holes;
    if (d.kind == FnDecl::Kind::ReachFlag) ++reach;
    if (d.kind == FnDecl::Kind::Rank) ++rank;
  }
  CHECK(holes == 1);
  CHECK(reach == 3);
  CHECK(rank == 3);
  // Refinement sets per sub-instance.
  CHECK(c.instances[0].refined == std::vector<int>{1});
  CHECK(c.instances[1].refined == std::vector<int>{2});
  CHECK(c.instances[2].refined == std::vector<int>{1, 2});
}

TEST_CASE("emit_script is deterministic and well-formed") {
  SynthesisProblem p = toggle_problem("G F x");
  ConstraintSet c1 = encode_mode(ground(p, 0), Mode::Ags);
  ConstraintSet c2 = encode_mode(ground(p, 0), Mode::Ags);
  std::string s1 = emit_script(c1), s2 = emit_script(c2);
  CHECK(s1 == s2);
  CHECK(s1.find("(set-logic QF_UFBV)") != std::string::npos);
  CHECK(s1.find("(check-sat)") != std::string::npos);
  CHECK(s1.find("(get-value ((h ") != std::string::npos);
  CHECK(s1.rfind("(declare-fun h ((_ BitVec 1)) Bool)") != std::string::npos);
}

TEST_CASE("empty constraint set emits a bare script") {
  ConstraintSet c;
  c.problem = "none";
  c.mode = "coop";
  std::string s = emit_script(c);
  CHECK(s.find("(check-sat)") != std::string::npos);
  CHECK(s.find("(assert") == std::string::npos);
}

TEST_CASE("cost fragment: always-false predicate is satisfiable under opt 1") {
  SynthesisProblem p = parse_problem(
      "problem costy\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c : bool input p1\n"
      "hole h of p1 outputs c observes x\n"
      "trans p1 { x' := ite(?h, !x, x); }\n"
      "trans p2 { y' := y; }\n"
      "cost zero := count h where ?h & !?h weight 1\n");
  GroundModel m = ground(p, 0);
  ConstraintSet c = encode_mode(m, Mode::Cooperative);
  encode_cost(c, 1);
  CHECK(enumerative_check_sat(c).status == SolveStatus::Sat);
  ConstraintSet c2 = encode_mode(m, Mode::Cooperative);
  CHECK_THROWS_AS(encode_cost(c2, 0), semantic_error);

  // A predicate that counts h(x)=true rows, bounded below the possible cost,
  // forces the all-false table.
  SynthesisProblem p2 = parse_problem(
      "problem costy2\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c : bool input p1\n"
      "hole h of p1 outputs c observes x\n"
      "trans p1 { x' := ite(?h, !x, x); }\n"
      "trans p2 { y' := y; }\n"
      "cost ones := count h where ?h weight 1\n");
  ConstraintSet c3 = encode_mode(ground(p2, 0), Mode::Cooperative);
  encode_cost(c3, 1);
  SolverResult r = enumerative_check_sat(c3);
  REQUIRE(r.status == SolveStatus::Sat);
  StrategyTables t = extract_tables(r, c3);
  CHECK(t.lookup("h", 0) == 0);
  CHECK(t.lookup("h", 1) == 0);
}

TEST_CASE("grounding budget errors") {
  SynthesisProblem p = parse_problem(
      "problem big\n"
      "var x : uint10 state p1 init 0\n"
      "var y : uint10 state p2 init 0\n"
      "var z : uint10 state shared init 0\n"
      "trans p1 { x' := x; z' := z; }\n"
      "trans p2 { y' := y; }\n");
  GroundModel m = ground(p, 0);
  EncodeOptions opts;
  opts.grounding_budget = 24;
  CHECK_THROWS_AS(encode_mode(m, Mode::Cooperative, opts), budget_error);
}

TEST_CASE("doubling the rank width does not change satisfiability") {
  // Spot check on two small problems: widen rank sort by re-encoding with a
  // doubled bound and compare enumerative status.
  for (const char* spec : {"G F x & G F !x", "G !x", "false"}) {
    SynthesisProblem p = toggle_problem(spec);
    GroundModel m = ground(p, 0);
    ConstraintSet c = encode_mode(m, Mode::Ags);
    SolveStatus base = enumerative_check_sat(c).status;
    // The enumerative oracle ignores rank widths (it analyses cycles), so
    // exercise the width path through the emitted script instead.
    for (auto& inst : c.instances) inst.rank_width *= 2;
    std::string wide = emit_script(c);
    CHECK(wide.find("rank!1") != std::string::npos);
    CHECK(enumerative_check_sat(c).status == base);
  }
}
