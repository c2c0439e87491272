#pragma once

#include <map>
#include <string>

#include "agsynth/encoder.hpp"

namespace agsynth {

// Serializes a ConstraintSet as an SMT-LIB v2 script (logic QF_UFBV, finite
// sorts as bitvectors, booleans native). Ends with (check-sat) followed by
// one (get-value ...) query per hole-table entry. Pure and byte-stable.
std::string emit_script(const ConstraintSet& c);

// Term/sort rendering, exposed for tests.
std::string smt_sort(const Sort& s);
std::string smt_term(const Term& t);

// Parses solver get-value output into (function name, packed argument bits)
// -> value bits. Accepts true/false, #b..., #x... and (_ bvN w) values.
std::map<std::pair<std::string, uint64_t>, uint64_t> parse_model_values(
    const std::string& output);

}  // namespace agsynth
