#include "agsynth/driver.hpp"

#include <chrono>
#include <future>
#include <json.hpp>
#include <sstream>

#include "agsynth/errors.hpp"
#include "agsynth/minimize.hpp"
#include "agsynth/smtlib.hpp"
#include "agsynth/strategy.hpp"

namespace agsynth {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void logline(const RunConfig& cfg, const std::string& s) {
  if (cfg.log) (*cfg.log) << s << "\n";
}

struct BoundAttempt {
  SolveStatus status;
  StrategyTables tables;
  double encode_s = 0, solve_s = 0;
  std::string diagnostics;
};

BoundAttempt attempt_bound(const SynthesisProblem& p, const RunConfig& cfg, int bound) {
  BoundAttempt out;
  auto t0 = std::chrono::steady_clock::now();
  GroundModel m = ground(p, bound);
  ConstraintSet c = encode_mode(m, cfg.mode, cfg.encode);
  std::string script = emit_script(c);
  out.encode_s = seconds_since(t0);

  SolverConfig sc = cfg.solver;
  sc.artifact_stem = p.name + "." + mode_name(cfg.mode) + ".b" + std::to_string(bound);
  t0 = std::chrono::steady_clock::now();
  SolverResult r = solve(script, sc);
  out.solve_s = seconds_since(t0);
  out.status = r.status;
  out.diagnostics = r.diagnostics;
  if (r.status == SolveStatus::Sat) {
    out.tables = extract_tables(r, c);
    out.tables.mode = mode_name(cfg.mode);
  }
  if (r.status == SolveStatus::Crashed)
    throw solver_error("solver crashed: " + r.diagnostics.substr(0, 4000));
  return out;
}

Solution make_solution(const SynthesisProblem& p, const GroundModel& m,
                       const RunConfig& cfg, StrategyTables tables) {
  Solution sol;
  sol.bound = m.bound;
  sol.tables = std::move(tables);
  sol.report = check_solution(m, sol.tables, cfg.mode);
  if (!sol.report.all_hold())
    throw internal_error(
        "solver model failed post-hoc verification; the encoding and the "
        "checker disagree on problem '" + p.name + "'");
  sol.exprs = table_expressions(m, sol.tables);
  if (!m.costs.empty()) sol.cost = cost_of(m, sol.tables);
  return sol;
}

}  // namespace

std::vector<std::pair<std::string, std::vector<std::string>>> table_expressions(
    const GroundModel& m, const StrategyTables& t) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& h : m.holes) {
    std::vector<std::string> exprs;
    std::vector<std::string> atoms;
    for (const auto& a : h.args) {
      if (a.width == 1) atoms.push_back(a.name);
      else
        for (int b = a.width - 1; b >= 0; --b)
          atoms.push_back(a.name + "[" + std::to_string(b) + "]");
    }
    for (int bit = h.out_width - 1; bit >= 0; --bit) {
      if (h.arg_bits > 8) {
        exprs.push_back("(table too wide; see rows)");
        continue;
      }
      std::vector<bool> table(h.rows());
      for (uint64_t row = 0; row < h.rows(); ++row)
        table[row] = (t.lookup(h.name, row) >> bit) & 1;
      exprs.push_back(minimize_expression(table, atoms));
    }
    out.emplace_back(h.name, std::move(exprs));
  }
  return out;
}

Solution optimize(const SynthesisProblem& p, const GroundModel& m,
                  const RunConfig& cfg, Solution start) {
  if (m.costs.empty() || !cfg.opt_range) return start;
  auto [opt_min_raw, opt_max] = *cfg.opt_range;
  uint64_t opt_min = std::max<uint64_t>(opt_min_raw, 1);

  ConstraintSet base = encode_mode(m, cfg.mode, cfg.encode);
  Solution current = std::move(start);
  uint64_t current_cost = current.cost.value_or(cost_of(m, current.tables));
  current.cost = current_cost;

  // Descend: ask for cost < opt with strictly decreasing opt values.
  uint64_t lo = opt_min, hi = std::min<uint64_t>(opt_max, current_cost);
  uint64_t opt = hi;
  while (opt >= lo) {
    ConstraintSet c = base;
    encode_cost(c, opt);
    SolverConfig sc = cfg.solver;
    sc.artifact_stem = p.name + "." + mode_name(cfg.mode) + ".b" +
                       std::to_string(m.bound) + ".opt" + std::to_string(opt);
    auto t0 = std::chrono::steady_clock::now();
    SolverResult r = solve(emit_script(c), sc);
    double secs = seconds_since(t0);
    current.timings.push_back({"opt<" + std::to_string(opt), secs});
    logline(cfg, "  opt<" + std::to_string(opt) + ": " + status_name(r.status) + " (" +
                     std::to_string(secs) + "s)");
    if (r.status == SolveStatus::Sat) {
      StrategyTables t = extract_tables(r, c);
      t.mode = mode_name(cfg.mode);
      Solution better = make_solution(p, m, cfg, std::move(t));
      better.timings = std::move(current.timings);
      better.opt_value = opt;
      current = std::move(better);
      current_cost = *current.cost;
      if (current_cost >= opt)
        throw internal_error("optimization returned a model violating its bound");
      if (cfg.opt_binary_search) {
        hi = opt - 1;
        uint64_t mid = lo + (std::min(hi, current_cost) - lo) / 2;
        if (std::min(hi, current_cost) < lo) break;
        opt = std::max(lo, mid);
      } else {
        // Linear descent; skipping values above the achieved cost only
        // removes vacuously-sat steps.
        if (current_cost == 0) break;
        uint64_t next = std::min<uint64_t>(opt - 1, current_cost);
        if (next < lo) break;
        opt = next;
      }
    } else if (r.status == SolveStatus::Unsat) {
      if (cfg.opt_binary_search && opt < std::min(hi, current_cost)) {
        lo = opt + 1;
        uint64_t upper = std::min(hi, current_cost);
        if (lo > upper) break;
        opt = lo + (upper - lo) / 2;
        continue;
      }
      break;  // current is optimal within the range
    } else {
      logline(cfg, "  optimization stopped on " + status_name(r.status));
      break;
    }
  }
  if (!current.opt_value) current.opt_value = std::min<uint64_t>(opt_max, current_cost + 1);
  return current;
}

SynthesisOutcome synthesize(const SynthesisProblem& p, const RunConfig& cfg) {
  SynthesisOutcome out;
  out.kind = SynthesisOutcome::Kind::UnrealizableAtBound;
  bool has_memory = p.memory[0].declared || p.memory[1].declared;
  int max_bound = has_memory ? cfg.max_memory : 0;

  std::vector<int> bounds;
  for (int b = 0; b <= max_bound; ++b) bounds.push_back(b);

  bool inconclusive_seen = false;

  auto handle = [&](int b, BoundAttempt att) -> bool {
    std::ostringstream note;
    note << "b=" << b << ": " << status_name(att.status) << " (encode "
         << att.encode_s << "s, solve " << att.solve_s << "s)";
    out.notes.push_back(note.str());
    logline(cfg, out.notes.back());
    ++out.bounds_tried;
    if (att.status == SolveStatus::Sat) {
      GroundModel m = ground(p, b);
      Solution sol = make_solution(p, m, cfg, std::move(att.tables));
      sol.timings.push_back({"b" + std::to_string(b) + ".encode", att.encode_s});
      sol.timings.push_back({"b" + std::to_string(b) + ".solve", att.solve_s});
      if (!m.costs.empty() && cfg.opt_range) sol = optimize(p, m, cfg, std::move(sol));
      out.solution = std::move(sol);
      out.kind = SynthesisOutcome::Kind::Solved;
      return true;
    }
    if (att.status != SolveStatus::Unsat) inconclusive_seen = true;
    return false;
  };

  if (cfg.portfolio && bounds.size() > 1) {
    std::vector<std::future<BoundAttempt>> futs;
    for (int b : bounds)
      futs.push_back(std::async(std::launch::async,
                                [&, b] { return attempt_bound(p, cfg, b); }));
    for (size_t i = 0; i < bounds.size(); ++i)
      if (handle(bounds[i], futs[i].get())) {
        // Later futures finish on their own; the smallest sat bound wins.
        for (size_t j = i + 1; j < futs.size(); ++j) futs[j].wait();
        return out;
      }
  } else {
    for (int b : bounds)
      if (handle(b, attempt_bound(p, cfg, b))) return out;
  }

  out.kind = inconclusive_seen ? SynthesisOutcome::Kind::Inconclusive
                               : SynthesisOutcome::Kind::UnrealizableAtBound;
  return out;
}

std::string solution_to_json(const SynthesisProblem& p, const GroundModel& m,
                             const Solution& sol) {
  json j = json::parse(tables_to_json(m, sol.tables, p.name));
  j["bound"] = sol.bound;
  if (sol.opt_value) j["opt"] = *sol.opt_value;
  if (sol.cost) j["cost"] = *sol.cost;
  for (auto& hj : j["holes"]) {
    for (const auto& [name, exprs] : sol.exprs)
      if (hj["name"] == name) hj["exprs"] = exprs;
  }
  json timings = json::array();
  for (const auto& t : sol.timings)
    timings.push_back({{"phase", t.phase}, {"seconds", t.seconds}});
  j["durations"] = timings;
  json ver;
  for (const auto& v : sol.report.cond) {
    if (v.instance.empty()) continue;
    ver[v.instance] = v.vacuous ? "holds-vacuously" : (v.holds ? "holds" : "violated");
  }
  j["verification"] = ver;
  return j.dump(2) + "\n";
}

}  // namespace agsynth
