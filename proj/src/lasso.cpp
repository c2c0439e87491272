#include "agsynth/lasso.hpp"

#include <map>

#include "agsynth/errors.hpp"

namespace agsynth {

namespace {

// Evaluates f at every position, memoized per subformula. U/R/F/G/W scan the
// position sequence; a window of |stem| + 2*|loop| steps covers every
// distinct future position from any start, so it decides the fixpoints.
class LassoEval {
public:
  explicit LassoEval(const Lasso& w) : w_(w), n_(w.length()) {
    if (w.loop.empty()) throw semantic_error("lasso loop must be nonempty");
  }

  const std::vector<char>& values(const Formula& f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    std::vector<char> v(n_, 0);
    switch (f->op) {
      case LtlOp::True:
        v.assign(n_, 1);
        break;
      case LtlOp::False:
        break;
      case LtlOp::Atom:
        for (size_t i = 0; i < n_; ++i) {
          auto p = w_.at(i).find(f->atom);
          if (p == w_.at(i).end())
            throw semantic_error("lasso does not assign signal '" + f->atom + "'");
          v[i] = p->second;
        }
        break;
      case LtlOp::Not: {
        const auto& a = values(f->left());
        for (size_t i = 0; i < n_; ++i) v[i] = !a[i];
        break;
      }
      case LtlOp::And: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = a[i] && b[i];
        break;
      }
      case LtlOp::Or: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = a[i] || b[i];
        break;
      }
      case LtlOp::Implies: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = !a[i] || b[i];
        break;
      }
      case LtlOp::Iff: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = a[i] == b[i];
        break;
      }
      case LtlOp::Next: {
        const auto& a = values(f->left());
        for (size_t i = 0; i < n_; ++i) v[i] = a[w_.next(i)];
        break;
      }
      case LtlOp::Eventually: {
        const auto& a = values(f->left());
        for (size_t i = 0; i < n_; ++i) v[i] = scan_until(nullptr, &a, i);
        break;
      }
      case LtlOp::Always: {
        const auto& a = values(f->left());
        for (size_t i = 0; i < n_; ++i) v[i] = scan_release(nullptr, &a, i);
        break;
      }
      case LtlOp::Until: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = scan_until(&a, &b, i);
        break;
      }
      case LtlOp::Release: {
        const auto& a = values(f->left());
        const auto& b = values(f->right());
        for (size_t i = 0; i < n_; ++i) v[i] = scan_release(&a, &b, i);
        break;
      }
    }
    return memo_.emplace(f.get(), std::move(v)).first->second;
  }

private:
  size_t window() const { return n_ + w_.loop.size(); }

  // a U b (a == nullptr means true U b, i.e. F b).
  bool scan_until(const std::vector<char>* a, const std::vector<char>* b, size_t start) {
    size_t pos = start;
    for (size_t k = 0; k <= window(); ++k) {
      if ((*b)[pos]) return true;
      if (a && !(*a)[pos]) return false;
      pos = w_.next(pos);
    }
    return false;  // b never occurs along the cycle
  }

  // a R b (a == nullptr means false R b, i.e. G b).
  bool scan_release(const std::vector<char>* a, const std::vector<char>* b, size_t start) {
    size_t pos = start;
    for (size_t k = 0; k <= window(); ++k) {
      if (!(*b)[pos]) return false;
      if (a && (*a)[pos]) return true;
      pos = w_.next(pos);
    }
    return true;  // b holds along the whole cycle
  }

  const Lasso& w_;
  size_t n_;
  std::map<const FormulaNode*, std::vector<char>> memo_;
};

}  // namespace

bool eval_ltl_on_lasso(const Formula& f, const Lasso& w) {
  LassoEval ev(w);
  // Position 0 is the first loop position when the stem is empty.
  return ev.values(f)[0] != 0;
}

}  // namespace agsynth
