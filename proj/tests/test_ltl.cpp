#include "doctest.h"

#include <random>

#include "agsynth/errors.hpp"
#include "agsynth/lasso.hpp"
#include "agsynth/ltl.hpp"

using namespace agsynth;

namespace {

const std::vector<std::string> kSig{"s", "a", "b", "cr1", "cr2", "flag1", "p"};

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

}  // namespace

TEST_CASE("parse fairness formula shape") {
  Formula f = parse_ltl("G F s & G F !s", kSig);
  CHECK(f->op == LtlOp::And);
  CHECK(f->left()->op == LtlOp::Always);
  CHECK(f->left()->left()->op == LtlOp::Eventually);
  CHECK(f->left()->left()->left()->op == LtlOp::Atom);
  CHECK(f->left()->left()->left()->atom == "s");
  CHECK(f->right()->op == LtlOp::Always);
  CHECK(f->right()->left()->left()->op == LtlOp::Not);
}

TEST_CASE("parse constants and mutex spec") {
  CHECK(parse_ltl("true", kSig)->op == LtlOp::True);
  Formula f = parse_ltl("G(!cr1 | !cr2) & G(flag1 -> F cr1)", kSig);
  CHECK(f->op == LtlOp::And);
  CHECK(f->left()->op == LtlOp::Always);
  CHECK(f->right()->op == LtlOp::Always);
}

TEST_CASE("precedence and associativity") {
  // ! > G/F/X > U/R > & > | > -> > <->
  CHECK(to_string(parse_ltl("a | b & s", kSig)) == "a | b & s");
  CHECK(parse_ltl("a | b & s", kSig)->op == LtlOp::Or);
  CHECK(parse_ltl("a -> b -> s", kSig)->right()->op == LtlOp::Implies);
  CHECK(parse_ltl("a U b U s", kSig)->op == LtlOp::Until);
  CHECK(parse_ltl("G a U b", kSig)->op == LtlOp::Until);
  CHECK(parse_ltl("!a U b", kSig)->left()->op == LtlOp::Not);
  CHECK(parse_ltl("a <-> b -> s", kSig)->op == LtlOp::Iff);
}

TEST_CASE("weak until rewrites at parse time") {
  Formula f = parse_ltl("a W b", kSig);
  CHECK(f->op == LtlOp::Release);
  CHECK(to_string(f) == "b R (b | a)");
}

TEST_CASE("parse errors carry position; undeclared atoms are named") {
  CHECK_THROWS_AS(parse_ltl("a &", kSig), parse_error);
  CHECK_THROWS_AS(parse_ltl("(a | b", kSig), parse_error);
  CHECK_THROWS_AS(parse_ltl("a @ b", kSig), parse_error);
  try {
    parse_ltl("G undeclared_x", kSig);
    CHECK(false);
  } catch (const semantic_error& e) {
    CHECK(std::string(e.what()).find("undeclared_x") != std::string::npos);
  }
  CHECK_NOTHROW(parse_ltl("G sched_p1", {}));
  CHECK_NOTHROW(parse_ltl("anything_goes", {}, true));
}

TEST_CASE("nnf examples") {
  CHECK(to_string(to_nnf(parse_ltl("!(G a)", kSig))) == "true U !a");
  CHECK(to_string(to_nnf(parse_ltl("!(a U b)", kSig))) == "!a R !b");
  CHECK(to_string(to_nnf(parse_ltl("a -> b", kSig))) == "!a | b");
  CHECK(is_nnf(to_nnf(parse_ltl("!(a <-> X b) U !(a R !b)", kSig))));
}

TEST_CASE("lasso oracle basics") {
  auto sigs = std::vector<std::string>{"p"};
  // G p on stem [], loop [p]
  CHECK(eval_ltl_on_lasso(parse_ltl("G p", kSig), make_lasso(sigs, {}, {1})));
  // F p on stem [!p], loop [!p]
  CHECK_FALSE(eval_ltl_on_lasso(parse_ltl("F p", kSig), make_lasso(sigs, {0}, {0})));
  // fairness on alternating loop
  auto s_only = std::vector<std::string>{"s"};
  CHECK(eval_ltl_on_lasso(parse_ltl("G F s & G F !s", kSig),
                          make_lasso(s_only, {}, {1, 0})));
  CHECK_FALSE(eval_ltl_on_lasso(parse_ltl("G F s & G F !s", kSig),
                                make_lasso(s_only, {0}, {1})));
}

TEST_CASE("lasso oracle handles stem/loop boundary") {
  auto sigs = std::vector<std::string>{"p"};
  // p holds only in the stem: F p true at 0, G p false, X p depends.
  Lasso w = make_lasso(sigs, {1, 0}, {0});
  CHECK(eval_ltl_on_lasso(parse_ltl("p", kSig), w));
  CHECK_FALSE(eval_ltl_on_lasso(parse_ltl("X p", kSig), w));
  CHECK_FALSE(eval_ltl_on_lasso(parse_ltl("G F p", kSig), w));
  // Loop of length 2 looping from position 1.
  Lasso v = make_lasso(sigs, {0}, {1, 0});
  CHECK(eval_ltl_on_lasso(parse_ltl("G F p & G F !p", kSig), v));
  CHECK(eval_ltl_on_lasso(parse_ltl("X p", kSig), v));
  CHECK(eval_ltl_on_lasso(parse_ltl("F(p & X X p)", kSig), v));
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

TEST_CASE("nnf preserves lasso semantics on random formulas") {
  std::mt19937 rng(20240811);
  std::vector<std::string> atoms{"a", "b"};
  for (int iter = 0; iter < 400; ++iter) {
    Formula f = random_formula(rng, 4, atoms);
    Formula g = to_nnf(f);
    REQUIRE(is_nnf(g));
    for (int wi = 0; wi < 12; ++wi) {
      std::uniform_int_distribution<int> len(0, 3), bits(0, 3), looplen(1, 3);
      std::vector<uint32_t> stem, loop;
      int sl = len(rng), ll = looplen(rng);
      for (int i = 0; i < sl; ++i) stem.push_back(bits(rng));
      for (int i = 0; i < ll; ++i) loop.push_back(bits(rng));
      Lasso w = make_lasso(atoms, stem, loop);
      CHECK(eval_ltl_on_lasso(f, w) == eval_ltl_on_lasso(g, w));
    }
  }
}

TEST_CASE("parse/print round trip") {
  for (const char* txt :
       {"G F s & G F !s", "G(!cr1 | !cr2) & G(flag1 -> F cr1)", "a U (b R !a)",
        "!(a <-> b) -> X X b", "F (a & X b) | G (b | a U s)"}) {
    Formula f = parse_ltl(txt, kSig);
    Formula g = parse_ltl(to_string(f), kSig);
    CHECK(f == g);  // hash-consing makes structural equality pointer equality
  }
}
