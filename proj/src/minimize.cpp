#include "agsynth/minimize.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "agsynth/errors.hpp"

namespace agsynth {

namespace {

int popcount32(uint32_t v) { return __builtin_popcount(v); }

bool covers(const Implicant& imp, uint32_t minterm) {
  return (minterm & imp.care) == imp.value;
}

// Branch-and-bound minimum cover: fewest implicants, then fewest literals,
// breaking remaining ties on the lexicographically smallest implicant list.
struct CoverSearch {
  const std::vector<Implicant>& primes;
  const std::vector<uint32_t>& minterms;
  std::vector<std::vector<int>> candidates;  // per minterm, covering primes
  std::vector<int> best;
  int best_literals = 1 << 30;

  void run() {
    std::vector<int> chosen;
    std::set<uint32_t> uncovered(minterms.begin(), minterms.end());
    explore(chosen, uncovered, 0);
  }

  void explore(std::vector<int>& chosen, std::set<uint32_t>& uncovered, int literals) {
    if (!best.empty()) {
      if (chosen.size() > best.size()) return;
      if (chosen.size() == best.size() && literals >= best_literals && !uncovered.empty())
        return;
    }
    if (uncovered.empty()) {
      std::vector<int> sorted = chosen;
      std::sort(sorted.begin(), sorted.end());
      bool better = best.empty() || sorted.size() < best.size() ||
                    (sorted.size() == best.size() && literals < best_literals) ||
                    (sorted.size() == best.size() && literals == best_literals &&
                     lex_less(sorted));
      if (better) {
        best = sorted;
        best_literals = literals;
      }
      return;
    }
    // Pick the uncovered minterm with the fewest candidate primes.
    uint32_t pick = *uncovered.begin();
    size_t pick_count = ~size_t(0);
    for (uint32_t mt : uncovered) {
      size_t cnt = 0;
      for (int pi : candidates[index_of(mt)]) {
        (void)pi;
        ++cnt;
      }
      if (cnt < pick_count) {
        pick_count = cnt;
        pick = mt;
      }
    }
    for (int pi : candidates[index_of(pick)]) {
      std::vector<uint32_t> newly;
      for (uint32_t mt : uncovered)
        if (covers(primes[pi], mt)) newly.push_back(mt);
      for (uint32_t mt : newly) uncovered.erase(mt);
      chosen.push_back(pi);
      explore(chosen, uncovered, literals + popcount32(primes[pi].care));
      chosen.pop_back();
      for (uint32_t mt : newly) uncovered.insert(mt);
    }
  }

  bool lex_less(const std::vector<int>& sorted) const {
    for (size_t i = 0; i < sorted.size() && i < best.size(); ++i) {
      auto key = [&](int pi) {
        return std::make_pair(primes[pi].care, primes[pi].value);
      };
      if (key(sorted[i]) != key(best[i])) return key(sorted[i]) < key(best[i]);
    }
    return false;
  }

  size_t index_of(uint32_t mt) const {
    return std::lower_bound(minterms.begin(), minterms.end(), mt) - minterms.begin();
  }
};

}  // namespace

std::vector<Implicant> prime_implicants(const std::vector<bool>& table, int n) {
  // Quine-McCluskey: combine implicants differing in one cared position.
  std::set<std::pair<uint32_t, uint32_t>> current;  // (care, value)
  uint32_t full = n >= 32 ? ~uint32_t(0) : (uint32_t(1) << n) - 1;
  for (uint32_t i = 0; i < table.size(); ++i)
    if (table[i]) current.insert({full, i});
  std::vector<Implicant> primes;
  while (!current.empty()) {
    std::set<std::pair<uint32_t, uint32_t>> next;
    std::set<std::pair<uint32_t, uint32_t>> combined;
    for (const auto& a : current) {
      for (int b = 0; b < n; ++b) {
        uint32_t bit = uint32_t(1) << b;
        if (!(a.first & bit)) continue;
        auto partner = std::make_pair(a.first, a.second ^ bit);
        if (current.count(partner)) {
          next.insert({a.first & ~bit, a.second & ~bit});
          combined.insert(a);
          combined.insert(partner);
        }
      }
    }
    for (const auto& a : current)
      if (!combined.count(a)) primes.push_back({a.first, a.second});
    current = std::move(next);
  }
  std::sort(primes.begin(), primes.end(), [](const Implicant& a, const Implicant& b) {
    return std::tie(a.care, a.value) < std::tie(b.care, b.value);
  });
  return primes;
}

std::string minimize_expression(const std::vector<bool>& table,
                                const std::vector<std::string>& arg_names) {
  int n = static_cast<int>(arg_names.size());
  if (table.size() != (size_t(1) << n))
    throw semantic_error("table size does not match the argument count");
  if (n > 8) throw budget_error("minimization limited to 8 inputs");

  bool any = false, all = true;
  for (bool b : table) {
    any = any || b;
    all = all && b;
  }
  if (!any) return "false";
  if (all) return "true";

  std::vector<uint32_t> minterms;
  for (uint32_t i = 0; i < table.size(); ++i)
    if (table[i]) minterms.push_back(i);
  std::vector<Implicant> primes = prime_implicants(table, n);

  CoverSearch search{primes, minterms, {}, {}, 1 << 30};
  search.candidates.resize(minterms.size());
  for (size_t mi = 0; mi < minterms.size(); ++mi)
    for (size_t pi = 0; pi < primes.size(); ++pi)
      if (covers(primes[pi], minterms[mi]))
        search.candidates[mi].push_back(static_cast<int>(pi));
  search.run();
  if (search.best.empty()) throw internal_error("cover search found nothing");

  // Verify exhaustive equivalence before rendering.
  for (uint32_t i = 0; i < table.size(); ++i) {
    bool v = false;
    for (int pi : search.best) v = v || covers(primes[pi], i);
    if (v != static_cast<bool>(table[i]))
      throw internal_error("minimized cover disagrees with the table");
  }

  std::string out;
  for (size_t k = 0; k < search.best.size(); ++k) {
    const Implicant& imp = primes[search.best[k]];
    if (k) out += " | ";
    std::string prod;
    for (int b = n - 1; b >= 0; --b) {
      uint32_t bit = uint32_t(1) << b;
      if (!(imp.care & bit)) continue;
      if (!prod.empty()) prod += " & ";
      // arg_names[0] corresponds to the highest bit.
      const std::string& name = arg_names[n - 1 - b];
      prod += (imp.value & bit) ? name : "!" + name;
    }
    out += prod.empty() ? "true" : prod;
  }
  return out;
}

}  // namespace agsynth
