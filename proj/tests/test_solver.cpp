#include "doctest.h"

#include "agsynth/errors.hpp"
#include "agsynth/smtlib.hpp"
#include "agsynth/solver.hpp"

using namespace agsynth;

namespace {

SolverConfig test_config() {
  SolverConfig cfg;
  cfg.workdir = "/tmp";
  cfg.timeout_seconds = 120;
  return cfg;
}

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

TEST_CASE("trivial scripts: sat / unsat") {
  CHECK(solve("(check-sat)\n", test_config()).status == SolveStatus::Sat);
  CHECK(solve("(assert false)(check-sat)\n", test_config()).status ==
        SolveStatus::Unsat);
}

TEST_CASE("missing executable is a configuration error") {
  SolverConfig cfg = test_config();
  cfg.executable = "/nonexistent/solver-binary";
  // find_solver_executable consults AGSYNTH_SOLVER first; shadow it.
  const char* saved = getenv("AGSYNTH_SOLVER");
  unsetenv("AGSYNTH_SOLVER");
  CHECK_THROWS_AS(solve("(check-sat)", cfg), solver_error);
  if (saved) setenv("AGSYNTH_SOLVER", saved, 1);
}

TEST_CASE("crashed solver is reported with diagnostics") {
  SolverConfig cfg = test_config();
  cfg.executable = "/bin/false";
  const char* saved = getenv("AGSYNTH_SOLVER");
  unsetenv("AGSYNTH_SOLVER");
  SolverResult r = solve("(check-sat)", cfg);
  if (saved) setenv("AGSYNTH_SOLVER", saved, 1);
  CHECK(r.status == SolveStatus::Crashed);
  CHECK(!r.diagnostics.empty());
}

TEST_CASE("tiny timeout forces a timeout status") {
  SolverConfig cfg = test_config();
  cfg.timeout_seconds = 0.01;
  SolverResult r = solve("(check-sat)", cfg);
  CHECK(r.status == SolveStatus::Timeout);
  CHECK(r.seconds < 5.0);
}

TEST_CASE("model value parsing formats") {
  auto v = parse_model_values(
      "sat\n(((f #b10) true))\n(((f #b01) false))\n((g #x0a))\n(((h #b1) (_ bv5 4)))\n");
  CHECK(v.at({"f", 2}) == 1);
  CHECK(v.at({"f", 1}) == 0);
  CHECK(v.at({"g", 0}) == 10);
  CHECK(v.at({"h", 1}) == 5);
}

TEST_CASE("end to end: encode, solve with z3, extract, agree with oracle") {
  for (const char* spec : {"G F x & G F !x", "G !x", "false", "true", "F x"}) {
    SynthesisProblem p = toggle_problem(spec);
    GroundModel m = ground(p, 0);
    for (Mode mode : {Mode::Cooperative, Mode::Ags}) {
      ConstraintSet c = encode_mode(m, mode);
      SolverResult ext = solve(emit_script(c), test_config());
      SolverResult ora = enumerative_check_sat(c);
      REQUIRE(ext.status != SolveStatus::Crashed);
      CHECK(status_name(ext.status) == status_name(ora.status));
      if (ext.status == SolveStatus::Sat) {
        StrategyTables t = extract_tables(ext, c);
        CHECK(t.tables.count("h") == 1);
        CHECK(t.tables.at("h").rows.size() == 2);
      }
    }
  }
}

TEST_CASE("extraction totality and missing entries") {
  SynthesisProblem p = toggle_problem("G F x");
  ConstraintSet c = encode_mode(ground(p, 0), Mode::Cooperative);
  SolverResult fake;
  fake.status = SolveStatus::Sat;
  fake.model_text = "sat\n(((h #b0) true))\n";  // missing row 1
  CHECK_THROWS_AS(extract_tables(fake, c), extraction_error);
  fake.status = SolveStatus::Unsat;
  CHECK_THROWS_AS(extract_tables(fake, c), extraction_error);
}

TEST_CASE("zero-arity holes produce single-row tables") {
  SynthesisProblem p = parse_problem(
      "problem z\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c : bool input p1\n"
      "hole h of p1 outputs c observes\n"
      "trans p1 { x' := ite(?h, !x, x); }\n"
      "trans p2 { y' := y; }\n"
      "spec p1 \"G F x & G F !x\"\n");
  ConstraintSet c = encode_mode(ground(p, 0), Mode::Cooperative);
  SolverResult r = solve(emit_script(c), test_config());
  REQUIRE(r.status == SolveStatus::Sat);
  StrategyTables t = extract_tables(r, c);
  CHECK(t.tables.at("h").rows.size() == 1);
  CHECK(t.lookup("h", 0) == 1);  // must toggle forever
}
