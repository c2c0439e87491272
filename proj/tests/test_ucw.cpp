#include "doctest.h"

#include <random>
#include <set>

#include "agsynth/errors.hpp"
#include "agsynth/ucw.hpp"

using namespace agsynth;

namespace {

const std::vector<std::string> kSig{"p", "q", "a", "b"};

Lasso make_lasso(const std::vector<std::string>& sigs,
                 const std::vector<uint32_t>& stem, const std::vector<uint32_t>& loop) {
  auto val = [&](uint32_t bits) {
    SignalValuation v;
    for (size_t i = 0; i < sigs.size(); ++i) v[sigs[i]] = (bits >> i) & 1;
    return v;
  };
  Lasso w;
  for (auto b : stem) w.stem.push_back(val(b));
  for (auto b : loop) w.loop.push_back(val(b));
  return w;
}

// All lassos over `sigs` with |stem| <= max_stem and 1 <= |loop| <= max_loop.
std::vector<Lasso> all_lassos(const std::vector<std::string>& sigs, int max_stem,
                              int max_loop) {
  int letters = 1 << sigs.size();
  std::vector<std::vector<uint32_t>> words[2];
  for (int which = 0; which < 2; ++which) {
    int lo = which == 0 ? 0 : 1;
    int hi = which == 0 ? max_stem : max_loop;
    for (int len = lo; len <= hi; ++len) {
      std::vector<uint32_t> w(len, 0);
      for (;;) {
        words[which].push_back(w);
        int i = len - 1;
        while (i >= 0 && static_cast<int>(++w[i]) == letters) w[i--] = 0;
        if (i < 0) break;
      }
    }
  }
  std::vector<Lasso> out;
  for (const auto& s : words[0])
    for (const auto& l : words[1]) out.push_back(make_lasso(sigs, s, l));
  return out;
}

bool agree(const Formula& f, const Lasso& w) {
  Ucw a = translate_to_ucw(f);
  return accepts_lasso(a, w) == eval_ltl_on_lasso(f, w);
}

}  // namespace

TEST_CASE("G p automaton: frozen cases") {
  Formula f = parse_ltl("G p", kSig);
  Ucw a = translate_to_ucw(f);
  std::vector<std::string> sigs{"p"};
  CHECK(accepts_lasso(a, make_lasso(sigs, {}, {1})));
  CHECK_FALSE(accepts_lasso(a, make_lasso(sigs, {1}, {0})));
  CHECK(agree(f, make_lasso(sigs, {1}, {0})));
  // Successor contract: under p, runs continue; under !p, a rejecting sink
  // becomes reachable.
  SignalValuation p_true{{"p", true}}, p_false{{"p", false}};
  auto succ_true = ucw_successors(a, a.initial, p_true);
  auto succ_false = ucw_successors(a, a.initial, p_false);
  CHECK(!succ_false.empty());
  bool hits_rejecting = false;
  for (int q : succ_false) hits_rejecting = hits_rejecting || a.rejecting[q];
  CHECK(hits_rejecting);
  for (int q : succ_true) CHECK_FALSE(a.rejecting[q]);
}

TEST_CASE("ucw_successors endpoints belong to transitions") {
  Formula f = parse_ltl("G(p -> F q)", kSig);
  Ucw a = translate_to_ucw(f);
  for (uint32_t bits = 0; bits < 4; ++bits) {
    SignalValuation v{{"p", (bits & 1) != 0}, {"q", (bits & 2) != 0}};
    for (int q = 0; q < a.num_states; ++q) {
      for (int dst : ucw_successors(a, q, v)) {
        bool found = false;
        for (const auto& t : a.transitions)
          found = found || (t.src == q && t.dst == dst);
        CHECK(found);
      }
    }
  }
  // A state with no matching outgoing label yields the empty set.
  Ucw tiny;
  tiny.num_states = 2;
  tiny.initial = 0;
  tiny.rejecting = {false, true};
  tiny.transitions.push_back({0, mk_atom("p"), 1});
  CHECK(ucw_successors(tiny, 0, {{"p", false}}).empty());
  CHECK(ucw_successors(tiny, 0, {{"p", true}}) == std::vector<int>{1});
  CHECK(ucw_successors(tiny, 1, {{"p", true}}).empty());
}

TEST_CASE("automaton for true accepts everything") {
  Ucw a = translate_to_ucw(parse_ltl("true", kSig));
  for (const auto& w : all_lassos({"p"}, 2, 2)) CHECK(accepts_lasso(a, w));
  // Rejecting states, if any, are unreachable from the initial state.
  std::set<int> reach{a.initial};
  size_t before = 0;
  while (before != reach.size()) {
    before = reach.size();
    for (const auto& t : a.transitions)
      if (reach.count(t.src)) reach.insert(t.dst);
  }
  for (int q : reach) CHECK_FALSE(a.rejecting[q]);
}

TEST_CASE("UCW with empty rejecting set accepts every lasso") {
  Ucw a = translate_to_ucw(parse_ltl("true", kSig));
  REQUIRE(a.num_states >= 1);
  a.rejecting.assign(a.num_states, false);
  for (const auto& w : all_lassos({"p", "q"}, 1, 2)) CHECK(accepts_lasso(a, w));
}

TEST_CASE("G F p rejects exactly loops without p") {
  Formula f = parse_ltl("G F p", kSig);
  Ucw a = translate_to_ucw(f);
  for (const auto& w : all_lassos({"p"}, 3, 3)) {
    bool loop_has_p = false;
    for (const auto& v : w.loop) loop_has_p = loop_has_p || v.at("p");
    CHECK(accepts_lasso(a, w) == loop_has_p);
    CHECK(accepts_lasso(a, w) == eval_ltl_on_lasso(f, w));
  }
  CHECK(accepts_lasso(a, make_lasso({"p"}, {}, {1, 0})));
}

TEST_CASE("state budget is enforced") {
  // Deep nesting of untils blows past a tiny budget.
  Formula f = parse_ltl("(a U b) U ((b U a) U (a U q)) U (q U p)", kSig);
  CHECK_THROWS_AS(translate_to_ucw(f, 3), budget_error);
}

TEST_CASE("oracle equivalence: exhaustive depth 2, all small lassos") {
  std::vector<std::string> atoms{"a", "b"};
  std::vector<Formula> d1;
  for (const auto& s : atoms) d1.push_back(mk_atom(s));
  d1.push_back(mk_true());
  d1.push_back(mk_false());
  std::vector<Formula> d2 = d1;
  for (const auto& f : d1) {
    d2.push_back(mk_not(f));
    d2.push_back(mk_next(f));
    d2.push_back(mk_eventually(f));
    d2.push_back(mk_always(f));
    for (const auto& g : d1) {
      d2.push_back(mk_and(f, g));
      d2.push_back(mk_or(f, g));
      d2.push_back(mk_implies(f, g));
      d2.push_back(mk_iff(f, g));
      d2.push_back(mk_until(f, g));
      d2.push_back(mk_release(f, g));
    }
  }
  auto lassos = all_lassos(atoms, 2, 2);
  size_t checked = 0;
  for (const auto& f : d2) {
    Ucw a = translate_to_ucw(f);
    for (const auto& w : lassos) {
      bool lhs = accepts_lasso(a, w);
      bool rhs = eval_ltl_on_lasso(f, w);
      if (lhs != rhs) {
        CAPTURE(to_string(f));
        CAPTURE(w.stem.size());
        CAPTURE(w.loop.size());
        REQUIRE(lhs == rhs);
      }
      ++checked;
    }
  }
  CHECK(checked > 40000);
}

namespace {
Formula random_formula(std::mt19937& rng, int depth,
                       const std::vector<std::string>& atoms) {
  std::uniform_int_distribution<int> leaf(0, 3), kind(0, 11);
  if (depth == 0 || leaf(rng) == 0) {
    int k = std::uniform_int_distribution<int>(0, static_cast<int>(atoms.size()) + 1)(rng);
    if (k == static_cast<int>(atoms.size())) return mk_true();
    if (k == static_cast<int>(atoms.size()) + 1) return mk_false();
    return mk_atom(atoms[k]);
  }
  switch (kind(rng)) {
    case 0: return mk_not(random_formula(rng, depth - 1, atoms));
    case 1: return mk_next(random_formula(rng, depth - 1, atoms));
    case 2: return mk_eventually(random_formula(rng, depth - 1, atoms));
    case 3: return mk_always(random_formula(rng, depth - 1, atoms));
    case 4:
      return mk_and(random_formula(rng, depth - 1, atoms),
                    random_formula(rng, depth - 1, atoms));
    case 5:
      return mk_or(random_formula(rng, depth - 1, atoms),
                   random_formula(rng, depth - 1, atoms));
    case 6:
      return mk_implies(random_formula(rng, depth - 1, atoms),
                        random_formula(rng, depth - 1, atoms));
    case 7:
      return mk_iff(random_formula(rng, depth - 1, atoms),
                    random_formula(rng, depth - 1, atoms));
    case 8:
    case 9:
      return mk_until(random_formula(rng, depth - 1, atoms),
                      random_formula(rng, depth - 1, atoms));
    default:
      return mk_release(random_formula(rng, depth - 1, atoms),
                        random_formula(rng, depth - 1, atoms));
  }
}
}  // namespace

TEST_CASE("oracle equivalence: random depth 4 formulas") {
  std::mt19937 rng(77);
  std::vector<std::string> atoms{"a", "b"};
  auto lassos = all_lassos(atoms, 2, 2);
  std::uniform_int_distribution<size_t> pick(0, lassos.size() - 1);
  for (int iter = 0; iter < 300; ++iter) {
    Formula f = random_formula(rng, 4, atoms);
    Ucw a = translate_to_ucw(f);
    for (int k = 0; k < 40; ++k) {
      const Lasso& w = lassos[pick(rng)];
      bool lhs = accepts_lasso(a, w);
      bool rhs = eval_ltl_on_lasso(f, w);
      if (lhs != rhs) {
        CAPTURE(to_string(f));
        REQUIRE(lhs == rhs);
      }
    }
  }
}

TEST_CASE("dot dump mentions every state") {
  Ucw a = translate_to_ucw(parse_ltl("G F p & G F !p", kSig));
  std::string dot = to_dot(a);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("doublecircle") != std::string::npos);
}
