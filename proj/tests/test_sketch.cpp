#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "agsynth/errors.hpp"
#include "agsynth/problem.hpp"
#include "agsynth/strategy.hpp"

using namespace agsynth;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string bench(const std::string& name) {
  const char* root = std::getenv("AGSYNTH_ROOT");
  REQUIRE(root != nullptr);
  return read_file(std::string(root) + "/benchmarks/" + name);
}

// The paper solution for Peterson: w11 = turn & flag2, w21 = !turn & flag1,
// both wait holes false. Row index packs (turn, flag_j), turn high.
StrategyTables peterson_solution() {
  StrategyTables t;
  t.bound = 0;
  t.tables["w11"] = {{0, 0, 0, 1}};
  t.tables["w21"] = {{0, 1, 0, 0}};
  t.tables["w12"] = {{0}};
  t.tables["w22"] = {{0}};
  return t;
}

}  // namespace

TEST_CASE("valuation restrict/concat laws") {
  auto dom = make_domain({{"a", 1}, {"b", 2}, {"c", 1}});
  Valuation v(dom);
  v.set("a", 1);
  v.set("b", 2);
  v.set("c", 0);
  CHECK(restrict_to(v, dom) == v);
  CHECK(restrict_to(v, make_domain({})).domain()->size() == 0);

  auto ab = make_domain({{"a", 1}, {"b", 2}});
  auto c = make_domain({{"c", 1}});
  Valuation u = restrict_to(v, ab), w = restrict_to(v, c);
  CHECK(restrict_to(concat(u, w), ab) == u);
  CHECK(concat(u, u) == u);
  CHECK(concat(u, Valuation()) == u);

  Valuation w2(c);
  w2.set("c", 1);
  Valuation uc = concat(u, restrict_to(v, c));
  CHECK_THROWS_AS(concat(uc, w2), semantic_error);
  CHECK_THROWS_AS(restrict_to(w, ab), semantic_error);
}

TEST_CASE("enumerate_valuations is lexicographic") {
  CHECK(enumerate_valuations(make_domain({})).size() == 1);
  auto one = enumerate_valuations(make_domain({{"x", 1}}));
  REQUIRE(one.size() == 2);
  CHECK(one[0].get("x") == 0);
  CHECK(one[1].get("x") == 1);
  auto two = enumerate_valuations(make_domain({{"turn", 1}, {"flag2", 1}}));
  REQUIRE(two.size() == 4);
  CHECK(two[0].to_string() == "turn=0 flag2=0");
  CHECK(two[1].to_string() == "turn=0 flag2=1");
  CHECK(two[2].to_string() == "turn=1 flag2=0");
  CHECK(two[3].to_string() == "turn=1 flag2=1");
  CHECK_THROWS_AS(enumerate_valuations(make_domain({{"big", 30}})), budget_error);
}

TEST_CASE("expression evaluation: wrap, contradictions, ite with hole") {
  Expr e = parse_expr("ite(pc1 == 2 & ?w11, 2, pc1 + 1)");
  resolve_widths(e, [](const std::string& n) { return n == "pc1" ? 3 : 1; }, 3);
  EvalEnv env;
  env.var = [](const std::string&) { return SVal::of(2, 3); };
  env.hole = [](const std::string&) { return SVal::of(0, 1); };
  CHECK(eval_expr_concrete(e, env) == 3);
  env.hole = [](const std::string&) { return SVal::of(1, 1); };
  CHECK(eval_expr_concrete(e, env) == 2);

  Expr contra = parse_expr("x & !x");
  resolve_widths(contra, [](const std::string&) { return 1; }, 1);
  for (uint64_t xv : {0u, 1u}) {
    EvalEnv e2;
    e2.var = [&](const std::string&) { return SVal::of(xv, 1); };
    CHECK(eval_expr_concrete(contra, e2) == 0);
  }

  Expr wrap = parse_expr("pc + 1");
  resolve_widths(wrap, [](const std::string&) { return 3; }, 3);
  EvalEnv e3;
  e3.var = [](const std::string&) { return SVal::of(7, 3); };
  CHECK(eval_expr_concrete(wrap, e3) == 0);  // modular wrap

  // Unresolved hole in concrete mode is an error.
  Expr h = parse_expr("?w11");
  resolve_widths(h, [](const std::string&) { return 1; }, 1);
  EvalEnv e4;
  e4.var = [](const std::string&) { return SVal::of(0, 1); };
  CHECK_THROWS_AS(eval_expr_concrete(h, e4), semantic_error);
}

TEST_CASE("minimal problem parses") {
  SynthesisProblem p = parse_problem(
      "problem tiny\n"
      "var x : bool state p1 init 0\n"
      "trans p1 { x' := x; }\n"
      "spec p1 \"true\"\n");
  CHECK(p.name == "tiny");
  CHECK(p.spec[0]->op == LtlOp::True);
  CHECK(p.spec[1]->op == LtlOp::True);
  CHECK(p.find_var("sched") != nullptr);
  GroundModel m = ground(p, 0);
  CHECK(m.ext_dom->total_bits() == 1);
}

TEST_CASE("peterson parses with expected structure") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  CHECK(p.name == "peterson");
  for (const char* v : {"turn", "pc1", "pc2"}) CHECK(p.find_var(v) != nullptr);
  REQUIRE(p.holes.size() == 4);
  CHECK(p.holes[0].name == "w11");
  CHECK(p.holes[0].observes == std::vector<std::string>{"turn", "flag2"});
  CHECK(p.holes[2].name == "w21");
  CHECK(p.holes[2].observes == std::vector<std::string>{"turn", "flag1"});
  CHECK(p.holes[1].observes.empty());
  GroundModel m = ground(p, 0);
  CHECK(m.ext_dom->total_bits() == 7);  // pc1, pc2: 3 bits each; turn: 1
  CHECK(m.find_hole("w11")->arg_bits == 2);
  CHECK(m.find_hole("w12")->arg_bits == 0);
  CHECK(total_table_bits(m) == 10);
}

TEST_CASE("semantic errors: bad observation, duplicate names, missing init") {
  CHECK_THROWS_AS(parse_problem("problem x\n"
                                "var a : bool state p1 init 0\n"
                                "var c : bool input p1\n"
                                "hole h of p1 outputs c observes nosuch\n"
                                "trans p1 { a' := a; }\n"),
                  semantic_error);
  CHECK_THROWS_AS(parse_problem("problem x\n"
                                "var a : bool state p1 init 0\n"
                                "var a : bool state p2 init 0\n"),
                  semantic_error);
  CHECK_THROWS_AS(parse_problem("problem x\n"
                                "var a : bool state p1\n"
                                "trans p1 { a' := a; }\n"),
                  semantic_error);
  // Observing the other process's input is a partial information violation.
  CHECK_THROWS_AS(parse_problem("problem x\n"
                                "var a : bool state p1 init 0\n"
                                "var i2 : bool input p2\n"
                                "var c : bool input p1\n"
                                "hole h of p1 outputs c observes i2\n"
                                "trans p1 { a' := a; }\n"),
                  semantic_error);
  // Syntax error carries a line number.
  try {
    parse_problem("problem x\nvar broken\n");
    CHECK(false);
  } catch (const parse_error& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("render/parse round trip is canonical") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  std::string r1 = render_problem(p);
  SynthesisProblem p2 = parse_problem(r1);
  CHECK(same_problem(p, p2));
  CHECK(render_problem(p2) == r1);
}

TEST_CASE("step: frame condition and peterson simulation") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  StrategyTables t = peterson_solution();

  Valuation g(m.step_dom);  // everything zero: pc1=0, pc2=0, turn=0
  g.set(kSchedVar, 1);
  Valuation n1 = step(m, t, g);
  CHECK(n1.get("pc1") == 1);  // flag-setting line executed next
  CHECK(n1.get("pc2") == 0);  // P2 frozen
  CHECK(signals_of(m, &t, g).at("flag1") == false);

  // After the step pc1 = 1, so flag1 holds.
  Valuation g2(m.step_dom);
  g2.set("pc1", n1.get("pc1"));
  g2.set(kSchedVar, 1);
  CHECK(signals_of(m, &t, g2).at("flag1") == true);

  // Frame law on random valuations: the unscheduled process's locals stay
  // unchanged.
  std::mt19937 rng(42);
  std::uniform_int_distribution<uint64_t> bits(0, (1 << m.step_dom->total_bits()) - 1);
  for (int i = 0; i < 200; ++i) {
    Valuation g3(m.step_dom, bits(rng));
    Valuation next = step(m, t, g3);
    int unsched = g3.get(kSchedVar) ? 2 : 1;
    for (const auto& name : p.state_vars_of(unsched)) {
      if (p.find_var(name)->owner == Owner::Shared) continue;
      CHECK(next.get(name) == g3.get(name));
    }
  }

  // Identity transition keeps the state put.
  SynthesisProblem idp = parse_problem(
      "problem id\n"
      "var x : uint2 state p1 init 2\n"
      "trans p1 { x' := x; }\n");
  GroundModel idm = ground(idp, 0);
  StrategyTables empty;
  Valuation gg(idm.step_dom);
  gg.set("x", 2);
  gg.set(kSchedVar, 1);
  CHECK(step(idm, empty, gg).get("x") == 2);
}

TEST_CASE("signals: builtins and peterson critical section") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  StrategyTables t = peterson_solution();
  Valuation g(m.step_dom);
  g.set("pc1", 4);
  g.set(kSchedVar, 0);
  auto sv = signals_of(m, &t, g);
  CHECK(sv.at("cr1") == true);
  CHECK(sv.at("cr2") == false);
  CHECK(sv.at("sched_p1") == false);
  CHECK(sv.at("sched_p2") == true);
}

TEST_CASE("memory: b=0 declares nothing, shared blocks merge, freeze rule") {
  std::string text =
      "problem memo\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "var c1 : bool input p1\n"
      "hole h1 of p1 outputs c1 observes x, mem\n"
      "memory of p1 bits M shared observes x, mem\n"
      "memory of p2 bits M shared observes y, mem\n"
      "trans p1 { x' := ite(?h1, !x, x); }\n"
      "trans p2 { y' := !y; }\n"
      "spec p1 \"true\"\n";
  SynthesisProblem p = parse_problem(text);

  GroundModel m0 = ground(p, 0);
  CHECK(m0.mem_vars.empty());
  CHECK(m0.find_hole("mu_p1") == nullptr);
  CHECK(m0.find_hole("h1")->arg_bits == 1);  // mem argument dropped at b=0

  GroundModel m1 = ground(p, 1);
  REQUIRE(m1.mem_vars.size() == 1);  // shared block
  CHECK(m1.mem_vars[0].name == "m_0");
  CHECK(m1.find_hole("h1")->arg_bits == 2);
  REQUIRE(m1.find_hole("mu_p1") != nullptr);
  REQUIRE(m1.find_hole("mu_p2") != nullptr);

  // Memory freezes when its owner is not scheduled; shared memory is written
  // by whichever process is scheduled.
  StrategyTables t;
  t.bound = 1;
  t.tables["h1"] = {{0, 0, 0, 0}};
  t.tables["mu_p1"] = {{1, 1, 1, 1}};  // always set
  t.tables["mu_p2"] = {{0, 0, 0, 0}};  // always clear
  Valuation g(m1.step_dom);
  g.set(kSchedVar, 1);
  CHECK(step(m1, t, g).get("m_0") == 1);
  g.set(kSchedVar, 0);
  CHECK(step(m1, t, g).get("m_0") == 0);

  // Disjoint memory: two blocks, the unscheduled one frozen.
  std::string disj =
      "problem memo2\n"
      "var x : bool state p1 init 0\n"
      "var y : bool state p2 init 0\n"
      "memory of p1 bits M observes x, mem\n"
      "memory of p2 bits M observes y, mem\n"
      "trans p1 { x' := !x; }\n"
      "trans p2 { y' := !y; }\n";
  GroundModel md = ground(parse_problem(disj), 1);
  REQUIRE(md.mem_vars.size() == 2);
  CHECK(md.mem_vars[0].name == "m1_0");
  CHECK(md.mem_vars[1].name == "m2_0");
  StrategyTables td;
  td.bound = 1;
  td.tables["mu_p1"] = {{1, 1, 1, 1}};
  td.tables["mu_p2"] = {{1, 1, 1, 1}};
  Valuation gd(md.step_dom);
  gd.set(kSchedVar, 1);
  Valuation nd = step(md, td, gd);
  CHECK(nd.get("m1_0") == 1);
  CHECK(nd.get("m2_0") == 0);  // frozen
}

TEST_CASE("tables json round trip and cost evaluation") {
  SynthesisProblem p = parse_problem(bench("peterson.ags"));
  GroundModel m = ground(p, 0);
  StrategyTables t = peterson_solution();
  t.mode = "ags";
  std::string js = tables_to_json(m, t, p.name);
  StrategyTables t2 = tables_from_json(p, js);
  CHECK(t2.lookup("w11", 3) == 1);
  CHECK(t2.lookup("w11", 2) == 0);
  CHECK(t2.lookup("w21", 1) == 1);
  std::string js2 = tables_to_json(m, t2, p.name);
  CHECK(js == js2);

  // Missing hole is an extraction error.
  CHECK_THROWS_AS(tables_from_json(p, "{\"bound\":0,\"holes\":[]}"), extraction_error);
}
