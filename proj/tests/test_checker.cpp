#include "doctest.h"

#include <fstream>
#include <sstream>

#include "agsynth/checker.hpp"
#include "agsynth/errors.hpp"
#include "agsynth/solver.hpp"
#include "agsynth/smtlib.hpp"
#include "agsynth/strategy.hpp"

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

StrategyTables peterson_ags_solution() {
  StrategyTables t;
  t.bound = 0;
  t.tables["w11"] = {{0, 0, 0, 1}};  // turn & flag2
  t.tables["w21"] = {{0, 1, 0, 0}};  // !turn & flag1
  t.tables["w12"] = {{0}};
  t.tables["w22"] = {{0}};
  return t;
}

StrategyTables peterson_coop_solution() {
  StrategyTables t;
  t.bound = 0;
  t.tables["w11"] = {{0, 0, 0, 1}};  // turn & flag2
  t.tables["w21"] = {{1, 1, 0, 0}};  // !turn  (ignores flag1)
  t.tables["w12"] = {{0}};
  t.tables["w22"] = {{0}};
  return t;
}

}  // namespace

TEST_CASE("spec true holds for any system") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  Verdict v = model_check(m, peterson_ags_solution(), mk_true(), {1, 2});
  CHECK(v.holds);
}

TEST_CASE("peterson paper solution passes the full AGS triple") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  AgsReport rep = check_solution(m, peterson_ags_solution(), Mode::Ags);
  CHECK(rep.cond[0].holds);
  CHECK(rep.cond[1].holds);
  CHECK(rep.cond[2].holds);
  CHECK(rep.all_hold());
}

TEST_CASE("cooperative solution: w21 = !turn starves P2 under condition (ii)") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  StrategyTables t = peterson_coop_solution();
  // It is a correct cooperative solution...
  AgsReport coop = check_solution(m, t, Mode::Cooperative);
  CHECK(coop.all_hold());
  CHECK(coop.cond[0].vacuous);
  // ...but not robust: with P1 unrefined, P1 may loop in local work forever
  // (w12 adversarially true), P2 waits on !turn and starves.
  AgsReport rep = check_solution(m, t, Mode::Ags);
  CHECK_FALSE(rep.cond[1].holds);
  REQUIRE(!rep.cond[1].loop.empty());
  // The counterexample replays and falsifies fair & phi1 -> phi2.
  CHECK(replay_counterexample(m, t, rep.cond[1]));
  // Starvation: in the loop, flag2 is raised but cr2 never happens.
  bool cr2_in_loop = false;
  for (const auto& s : rep.cond[1].loop) cr2_in_loop = cr2_in_loop || s.signals.at("cr2");
  CHECK_FALSE(cr2_in_loop);
  std::string text = render_counterexample(m, rep.cond[1]);
  CHECK(text.find("loop") != std::string::npos);
}

TEST_CASE("constructed mutex violation is caught by condition (iii)") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  StrategyTables t;  // never wait: both processes storm into the section
  t.bound = 0;
  t.tables["w11"] = {{0, 0, 0, 0}};
  t.tables["w21"] = {{0, 0, 0, 0}};
  t.tables["w12"] = {{0}};
  t.tables["w22"] = {{0}};
  AgsReport rep = check_solution(m, t, Mode::Ags);
  CHECK_FALSE(rep.all_hold());
  CHECK_FALSE(rep.cond[2].holds);
  // The violation witnesses cr1 & cr2 somewhere along the trace.
  bool both = false;
  for (const auto& s : rep.cond[2].stem)
    both = both || (s.signals.at("cr1") && s.signals.at("cr2"));
  for (const auto& s : rep.cond[2].loop)
    both = both || (s.signals.at("cr1") && s.signals.at("cr2"));
  CHECK(both);
}

TEST_CASE("brute force: peterson has exactly one AGS solution out of 1024") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  CHECK(total_table_bits(m) == 10);
  auto sols = brute_force_synthesize(m, Mode::Ags);
  REQUIRE(sols.size() == 1);
  StrategyTables expect = peterson_ags_solution();
  CHECK(sols[0].tables.at("w11").rows == expect.tables.at("w11").rows);
  CHECK(sols[0].tables.at("w21").rows == expect.tables.at("w21").rows);
  CHECK(sols[0].tables.at("w12").rows == expect.tables.at("w12").rows);
  CHECK(sols[0].tables.at("w22").rows == expect.tables.at("w22").rows);

  // The cooperative family is a strict superset.
  auto coop = brute_force_synthesize(m, Mode::Cooperative);
  CHECK(coop.size() > 1);
  bool contains_ags = false;
  for (const auto& s : coop)
    contains_ags = contains_ags || s.tables.at("w11").rows == expect.tables.at("w11").rows;
  CHECK(contains_ags);
}

TEST_CASE("spec false yields no brute-force solutions") {
  SynthesisProblem p = parse_problem(
      "problem nope\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c : bool input p1\n"
      "hole h of p1 outputs c observes x\n"
      "trans p1 { x' := ite(?h, !x, x); }\n"
      "trans p2 { y' := y; }\n"
      "spec p1 \"false\"\n");
  GroundModel m = ground(p, 0);
  CHECK(brute_force_synthesize(m, Mode::Ags).empty());
}

TEST_CASE("AGS robustness: P1 tables vs every unrefined P2") {
  // For the unique AGS solution, condition (i) holds with P2 fully
  // unconstrained, which quantifies over every b=0 refinement of P2.
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  Formula fair = fair_formula();
  Formula f = mk_implies(mk_and(fair, p.spec[1]), p.spec[0]);
  Verdict v = model_check(m, peterson_ags_solution(), f, {1});
  CHECK(v.holds);
}

TEST_CASE("encoder and checker agree on the toggle family (Prop 1 & 2)") {
  for (const char* spec : {"G F x & G F !x", "G !x", "F x", "false"}) {
    SynthesisProblem p = parse_problem(
        "problem t\n"
        "var x : bool state p1 init 0\n"
        "var y : bool state p2 init 0\n"
        "var c : bool input p1\n"
        "hole h of p1 outputs c observes x\n"
        "trans p1 { x' := ite(?h, !x, x); }\n"
        "trans p2 { y' := y; }\n"
        "spec p1 \"" + std::string(spec) + "\"\n");
    GroundModel m = ground(p, 0);
    for (Mode mode : {Mode::Cooperative, Mode::Ags}) {
      ConstraintSet c = encode_mode(m, mode);
      SolverResult r = enumerative_check_sat(c);
      auto brute = brute_force_synthesize(m, mode, 20, 1);
      CHECK((r.status == SolveStatus::Sat) == !brute.empty());
      if (r.status == SolveStatus::Sat) {
        StrategyTables t = extract_tables(r, c);
        t.mode = mode_name(mode);
        CHECK(check_solution(m, t, mode).all_hold());
      }
    }
  }
}
