#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agsynth {

// Exact two-level minimization (prime implicants + minimum cover) of one
// output bit over n <= 8 inputs. `table` holds 2^n entries, entry i is the
// value at input combination i (first variable in the highest bit).
// `arg_names` matches that order; multi-bit observations are rendered as
// name[k] atoms by the caller. Returns a sum-of-products string such as
// "turn & flag2", or "true"/"false". Deterministic: ties break towards fewer
// literals, then lexicographically smaller implicants.
std::string minimize_expression(const std::vector<bool>& table,
                                const std::vector<std::string>& arg_names);

// Evaluates a rendered expression's source table entry; used to verify
// exhaustive equivalence before returning (exposed for tests).
struct Implicant {
  uint32_t care = 0;   // mask of tested positions
  uint32_t value = 0;  // required values on the tested positions
};

std::vector<Implicant> prime_implicants(const std::vector<bool>& table, int n);

}  // namespace agsynth
