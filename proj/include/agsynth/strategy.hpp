#pragma once

#include <string>

#include "agsynth/problem.hpp"

namespace agsynth {

// Serialization of strategy tables as the machine-readable part of solution
// files. Row bits are row-major: row index packs the observation list in
// declaration order (first observed variable most significant); each row
// stores out_width bits, first output variable highest.
std::string tables_to_json(const GroundModel& m, const StrategyTables& t,
                           const std::string& problem_name);

// Reads tables back; validates hole names, row counts and widths against the
// model at the bound recorded in the file.
StrategyTables tables_from_json(const SynthesisProblem& p, const std::string& json_text,
                                GroundModel* model_out = nullptr);

// Total declared table bits (enumeration cost) of a model.
int total_table_bits(const GroundModel& m);

// Evaluates the declared cost functions of a problem for concrete tables.
uint64_t cost_of(const GroundModel& m, const StrategyTables& t);

}  // namespace agsynth
