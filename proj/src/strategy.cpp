#include "agsynth/strategy.hpp"

#include <json.hpp>

#include "agsynth/errors.hpp"

namespace agsynth {

using nlohmann::json;

namespace {

std::string row_bits(uint64_t value, int width) {
  std::string s(width, '0');
  for (int i = 0; i < width; ++i)
    if ((value >> (width - 1 - i)) & 1) s[i] = '1';
  return s;
}

}  // namespace

std::string tables_to_json(const GroundModel& m, const StrategyTables& t,
                           const std::string& problem_name) {
  json j;
  j["problem"] = problem_name;
  j["mode"] = t.mode;
  j["bound"] = t.bound;
  json holes = json::array();
  for (const auto& h : m.holes) {
    json hj;
    hj["name"] = h.name;
    hj["process"] = h.process;
    hj["role"] = h.role == HoleRole::Control ? "control" : "memory-update";
    json args = json::array();
    for (const auto& a : h.args) args.push_back({{"name", a.name}, {"width", a.width}});
    hj["args"] = args;
    json outs = json::array();
    for (const auto& [n, w] : h.outputs) outs.push_back({{"name", n}, {"width", w}});
    hj["outputs"] = outs;
    std::string bits;
    for (uint64_t r = 0; r < h.rows(); ++r)
      bits += row_bits(t.lookup(h.name, r), h.out_width);
    hj["rows"] = bits;
    holes.push_back(hj);
  }
  j["holes"] = holes;
  return j.dump(2) + "\n";
}

StrategyTables tables_from_json(const SynthesisProblem& p, const std::string& json_text,
                                GroundModel* model_out) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw extraction_error(std::string("bad solution file: ") + e.what());
  }
  StrategyTables t;
  t.bound = j.value("bound", 0);
  t.mode = j.value("mode", "ags");
  GroundModel m = ground(p, t.bound);
  if (!j.contains("holes") || !j["holes"].is_array())
    throw extraction_error("solution file lacks a holes array");
  for (const auto& hj : j["holes"]) {
    std::string name = hj.value("name", "");
    const GroundHole* h = m.find_hole(name);
    if (!h) throw extraction_error("solution file names unknown hole '" + name + "'");
    std::string bits = hj.value("rows", "");
    if (bits.size() != h->rows() * static_cast<uint64_t>(h->out_width))
      throw extraction_error("hole '" + name + "' has " + std::to_string(bits.size()) +
                             " row bits, expected " +
                             std::to_string(h->rows() * h->out_width));
    HoleTable table;
    for (uint64_t r = 0; r < h->rows(); ++r) {
      uint64_t v = 0;
      for (int b = 0; b < h->out_width; ++b) {
        char c = bits[r * h->out_width + b];
        if (c != '0' && c != '1')
          throw extraction_error("hole '" + name + "' has non-binary row bits");
        v = (v << 1) | (c == '1');
      }
      table.rows.push_back(v);
    }
    t.tables[name] = std::move(table);
  }
  for (const auto& h : m.holes)
    if (!t.has(h.name))
      throw extraction_error("solution file misses hole '" + h.name + "'");
  if (model_out) *model_out = std::move(m);
  return t;
}

int total_table_bits(const GroundModel& m) {
  int bits = 0;
  for (const auto& h : m.holes)
    bits += static_cast<int>(h.rows()) * h.out_width;
  return bits;
}

uint64_t cost_of(const GroundModel& m, const StrategyTables& t) {
  uint64_t total = 0;
  for (const auto& c : m.costs) {
    const GroundHole* h = m.find_hole(c.hole);
    if (!h) continue;  // mu hole absent at b = 0
    for (uint64_t row = 0; row < h->rows(); ++row) {
      EvalEnv env;
      env.var = [&](const std::string& n) -> SVal {
        int off = h->arg_bits;
        for (const auto& a : h->args) {
          off -= a.width;
          if (a.name == n)
            return SVal::of((row >> off) & ((uint64_t(1) << a.width) - 1), a.width);
        }
        throw semantic_error("cost predicate reads '" + n +
                             "' outside the observation list");
      };
      env.hole = [&](const std::string& n) -> SVal {
        if (n != h->name)
          throw semantic_error("cost predicate references foreign hole '?" + n + "'");
        return SVal::of(t.lookup(n, row), h->out_width);
      };
      if (eval_expr_concrete(c.pred, env)) total += static_cast<uint64_t>(c.weight);
    }
  }
  return total;
}

}  // namespace agsynth
