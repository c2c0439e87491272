#pragma once

#include <map>
#include <string>
#include <vector>

#include "agsynth/ltl.hpp"

namespace agsynth {

// A valuation of the signals at one trace position.
using SignalValuation = std::map<std::string, bool>;

// Ultimately periodic word stem . loop^omega; loop must be nonempty and every
// position must assign every signal the formula mentions.
struct Lasso {
  std::vector<SignalValuation> stem;
  std::vector<SignalValuation> loop;

  size_t length() const { return stem.size() + loop.size(); }
  const SignalValuation& at(size_t i) const {
    return i < stem.size() ? stem[i] : loop[i - stem.size()];
  }
  // Successor position; wraps from the last loop position to the loop start.
  size_t next(size_t i) const {
    return i + 1 < length() ? i + 1 : stem.size();
  }
};

// Semantic oracle: standard LTL semantics evaluated position-wise on the
// lasso. Independent of the automaton route; works on the full operator set
// (no NNF required).
bool eval_ltl_on_lasso(const Formula& f, const Lasso& w);

}  // namespace agsynth
