#include "agsynth/checker.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "agsynth/errors.hpp"
#include "agsynth/strategy.hpp"

namespace agsynth {

namespace {

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Translation cache: formulas are hash-consed, so the node pointer is an
// identity. Brute-force enumeration re-checks the same formulas for
// thousands of table candidates.
const Ucw& cached_ucw(const Formula& f) {
  static std::mutex mu;
  static std::map<const FormulaNode*, Ucw> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(f.get());
  if (it == cache.end()) it = cache.emplace(f.get(), translate_to_ucw(f)).first;
  return it->second;
}

// Fully concrete step semantics for a given refinement set: refined holes
// resolve through tables, unrefined controllables come from the choice
// valuation. Mirrors the interleaving semantics of step().
struct SystemContext {
  const GroundModel& m;
  const StrategyTables& t;
  std::vector<int> refined;
  DomainPtr ext;      // extended states of the refined processes
  DomainPtr choice;   // uncontrollable inputs (sched last) + unrefined controllables

  SystemContext(const GroundModel& m_, const StrategyTables& t_, std::vector<int> r)
      : m(m_), t(t_), refined(std::move(r)) {
    ext = m.ext_dom_for(refined);
    std::vector<std::pair<std::string, int>> ch;
    for (const auto& s : m.unctrl_input_dom->slots()) ch.emplace_back(s.name, s.width);
    for (const auto& s : m.ctrl_dom->slots()) {
      const HoleDecl* hd = m.prob->hole_writing(s.name);
      if (!contains(refined, hd->process)) ch.emplace_back(s.name, s.width);
    }
    choice = make_domain(ch);
  }

  struct Env {
    const SystemContext& ctx;
    Valuation x;
    Valuation ch;

    SVal var(const std::string& n) const {
      if (ctx.ext->contains(n)) return SVal::of(x.get(n), ctx.ext->slot(n).width);
      if (ctx.choice->contains(n)) return SVal::of(ch.get(n), ctx.choice->slot(n).width);
      const VarDecl* vd = ctx.m.prob->find_var(n);
      if (vd && vd->kind == VarKind::Input && ctx.m.prob->is_controllable(n)) {
        const HoleDecl* hd = ctx.m.prob->hole_writing(n);
        const GroundHole* h = ctx.m.find_hole(hd->name);
        uint64_t packed = hole_value(*h);
        int off = h->out_width;
        for (const auto& [on, ow] : h->outputs) {
          off -= ow;
          if (on == n)
            return SVal::of((packed >> off) & ((uint64_t(1) << ow) - 1), vd->width);
        }
        throw internal_error("missing output slice for '" + n + "'");
      }
      if (const SignalDef* sd = ctx.m.prob->find_signal(n))
        return eval_expr(sd->def, env());
      throw semantic_error("checker: unknown name '" + n + "'");
    }

    uint64_t hole_value(const GroundHole& h) const {
      uint64_t row = 0;
      for (const auto& a : h.args) {
        uint64_t v;
        if (a.name == "mem") {
          v = 0;
          for (const auto& mn : ctx.m.mem_vars_of(h.process)) v = (v << 1) | var(mn).bits;
        } else {
          v = var(a.name).bits;
        }
        row = (row << a.width) | (v & ((uint64_t(1) << a.width) - 1));
      }
      return ctx.t.lookup(h.name, row);
    }

    SVal hole_ref(const std::string& n) const {
      const GroundHole* h = ctx.m.find_hole(n);
      if (!h) throw semantic_error("unknown hole '?" + n + "'");
      if (!contains(ctx.refined, h->process)) {
        uint64_t packed = 0;
        for (const auto& [on, ow] : h->outputs) packed = (packed << ow) | ch.get(on);
        return SVal::of(packed, h->out_width);
      }
      return SVal::of(hole_value(*h), h->out_width);
    }

    EvalEnv env() const {
      EvalEnv e;
      e.var = [this](const std::string& n) { return var(n); };
      e.hole = [this](const std::string& n) { return hole_ref(n); };
      return e;
    }
  };

  uint64_t successor(uint64_t xbits, const Valuation& ch) const {
    Env ev{*this, Valuation(ext, xbits), ch};
    int sched = ch.get(kSchedVar) ? 1 : 2;
    Valuation succ(ext, xbits);
    for (const auto& vd : m.prob->vars) {
      if (vd.kind != VarKind::State) continue;
      bool writable = vd.owner == Owner::Shared ||
                      (sched == 1 ? vd.owner == Owner::P1 : vd.owner == Owner::P2);
      if (!writable) continue;
      if (const Expr* e = m.prob->procs[sched - 1].assign_for(vd.name))
        succ.set(vd.name, eval_expr_concrete(*e, ev.env()));
    }
    if (contains(refined, sched)) {
      auto mems = m.mem_vars_of(sched);
      if (!mems.empty()) {
        const GroundHole* mu = m.find_hole("mu_p" + std::to_string(sched));
        uint64_t out = ev.hole_value(*mu);
        int off = static_cast<int>(mems.size());
        for (const auto& mn : mems) {
          --off;
          if (ext->contains(mn)) succ.set(mn, (out >> off) & 1);
        }
      }
    }
    return succ.bits();
  }

  SignalValuation signals(uint64_t xbits, const Valuation& ch) const {
    Env ev{*this, Valuation(ext, xbits), ch};
    SignalValuation out;
    for (const auto& s : m.prob->signals)
      out[s.name] = eval_expr_concrete(s.def, ev.env()) != 0;
    bool sched = ch.get(kSchedVar) != 0;
    out["sched_p1"] = sched;
    out["sched_p2"] = !sched;
    return out;
  }

  // Global valuation (ext + choices + refined controllables) for traces.
  Valuation global(uint64_t xbits, const Valuation& ch) const {
    Env ev{*this, Valuation(ext, xbits), ch};
    std::vector<std::pair<std::string, int>> vars;
    for (const auto& s : ext->slots()) vars.emplace_back(s.name, s.width);
    for (const auto& s : choice->slots()) vars.emplace_back(s.name, s.width);
    for (const auto& s : m.ctrl_dom->slots())
      if (!choice->contains(s.name)) vars.emplace_back(s.name, s.width);
    Valuation g(make_domain(vars));
    Valuation xv(ext, xbits);
    for (const auto& s : ext->slots()) g.set(s.name, xv.get(s.name));
    for (const auto& s : choice->slots()) g.set(s.name, ch.get(s.name));
    for (const auto& s : m.ctrl_dom->slots())
      if (!choice->contains(s.name)) g.set(s.name, ev.var(s.name).bits);
    return g;
  }

  Valuation initial() const {
    Valuation x(ext);
    for (const auto& vd : m.prob->vars)
      if (vd.kind == VarKind::State) x.set(vd.name, vd.init);
    return x;
  }
};

}  // namespace

StrategyTables tables_from_counter(const GroundModel& m, uint64_t counter) {
  StrategyTables t;
  t.bound = m.bound;
  int pos = total_table_bits(m);
  for (const auto& h : m.holes) {
    HoleTable table;
    for (uint64_t row = 0; row < h.rows(); ++row) {
      pos -= h.out_width;
      table.rows.push_back((counter >> pos) & ((uint64_t(1) << h.out_width) - 1));
    }
    t.tables[h.name] = std::move(table);
  }
  return t;
}

Verdict model_check(const GroundModel& m, const StrategyTables& t, const Formula& spec,
                    const std::vector<int>& refined, int state_budget) {
  Verdict v;
  v.formula = spec;
  v.refined = refined;
  const Ucw& aut = cached_ucw(spec);
  SystemContext sys(m, t, refined);
  auto choices = enumerate_valuations(sys.choice);
  auto outgoing = aut.outgoing();

  struct NodeKey {
    uint64_t x;
    int q;
    bool operator<(const NodeKey& o) const { return std::tie(x, q) < std::tie(o.x, o.q); }
  };
  std::map<NodeKey, int> ids;
  std::vector<NodeKey> nodes;
  struct Edge {
    int dst;
    int choice;
  };
  std::vector<std::vector<Edge>> adj;
  std::vector<int> bfs_parent, bfs_choice;

  auto id_of = [&](uint64_t x, int q) {
    auto [it, fresh] = ids.emplace(NodeKey{x, q}, (int)nodes.size());
    if (fresh) {
      nodes.push_back({x, q});
      adj.emplace_back();
      bfs_parent.push_back(-1);
      bfs_choice.push_back(-1);
      if ((int)nodes.size() > state_budget)
        throw budget_error("model check product exceeds " +
                           std::to_string(state_budget) + " states");
    }
    return it->second;
  };

  Valuation x0 = sys.initial();
  int init = id_of(x0.bits(), aut.initial);
  std::deque<int> queue{init};
  std::set<int> queued{init};
  // Per x, the successor/letter rows are choice-indexed and q-independent.
  std::map<uint64_t, std::vector<std::pair<uint64_t, SignalValuation>>> step_cache;

  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    NodeKey nk = nodes[id];
    auto it = step_cache.find(nk.x);
    if (it == step_cache.end()) {
      std::vector<std::pair<uint64_t, SignalValuation>> rows;
      rows.reserve(choices.size());
      for (const auto& ch : choices)
        rows.emplace_back(sys.successor(nk.x, ch), sys.signals(nk.x, ch));
      it = step_cache.emplace(nk.x, std::move(rows)).first;
    }
    for (size_t ci = 0; ci < choices.size(); ++ci) {
      const auto& [succ, letter] = it->second[ci];
      for (int ti : outgoing[nk.q]) {
        const auto& tr = aut.transitions[ti];
        if (!eval_label(tr.label, letter)) continue;
        int dst = id_of(succ, tr.dst);
        adj[id].push_back({dst, (int)ci});
        if (bfs_parent[dst] < 0 && dst != init) {
          bfs_parent[dst] = id;
          bfs_choice[dst] = (int)ci;
        }
        if (queued.insert(dst).second) queue.push_back(dst);
      }
    }
  }

  // SCC analysis; violated iff a cycle passes a rejecting automaton state.
  int n = static_cast<int>(nodes.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;
  struct Frame { int v; size_t child; };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      if (fr.child < adj[fr.v].size()) {
        int w = adj[fr.v][fr.child++].dst;
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
      } else {
        int vtx = fr.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[vtx]);
        if (low[vtx] == index[vtx]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == vtx) break;
          }
          ++next_comp;
        }
      }
    }
  }
  std::vector<int> comp_size(next_comp, 0);
  std::vector<char> comp_cycle(next_comp, 0);
  for (int i = 0; i < n; ++i) ++comp_size[comp[i]];
  for (int i = 0; i < n; ++i)
    for (const auto& e : adj[i])
      if (comp[e.dst] == comp[i] && (e.dst == i || comp_size[comp[i]] > 1))
        comp_cycle[comp[i]] = 1;

  int bad = -1;
  for (int i = 0; i < n && bad < 0; ++i)
    if (aut.rejecting[nodes[i].q] && comp_cycle[comp[i]]) bad = i;
  if (bad < 0) return v;  // holds

  v.holds = false;

  // Stem: BFS parents give a shortest path from the initial node to bad.
  std::vector<int> stem_path;
  for (int cur = bad; cur != init; cur = bfs_parent[cur]) stem_path.push_back(cur);
  stem_path.push_back(init);
  std::reverse(stem_path.begin(), stem_path.end());

  // Loop: BFS inside the SCC from bad back to itself; steps are (node,
  // choice) pairs along the cycle.
  std::vector<std::pair<int, int>> loop_steps;
  {
    std::map<int, std::pair<int, int>> parent;
    std::deque<int> q2{bad};
    std::set<int> seen;
    std::pair<int, int> closing{-1, -1};
    while (!q2.empty() && closing.first < 0) {
      int cur = q2.front();
      q2.pop_front();
      for (const auto& e : adj[cur]) {
        if (comp[e.dst] != comp[bad]) continue;
        if (e.dst == bad) {
          closing = {cur, e.choice};
          break;
        }
        if (seen.insert(e.dst).second) {
          parent[e.dst] = {cur, e.choice};
          q2.push_back(e.dst);
        }
      }
    }
    if (closing.first < 0) throw internal_error("SCC cycle extraction failed");
    loop_steps.emplace_back(closing);
    int cur = closing.first;
    while (cur != bad) {
      auto [p, c] = parent.at(cur);
      loop_steps.emplace_back(p, c);
      cur = p;
    }
    std::reverse(loop_steps.begin(), loop_steps.end());
  }

  auto push_step = [&](std::vector<TraceStep>& out, int node_id, int choice_idx) {
    const NodeKey& nk = nodes[node_id];
    const Valuation& ch = choices[choice_idx];
    TraceStep s;
    s.global = sys.global(nk.x, ch);
    s.signals = sys.signals(nk.x, ch);
    out.push_back(std::move(s));
  };
  for (size_t i = 0; i + 1 < stem_path.size(); ++i)
    push_step(v.stem, stem_path[i], bfs_choice[stem_path[i + 1]]);
  for (const auto& [nd, c] : loop_steps) push_step(v.loop, nd, c);
  return v;
}

AgsReport check_solution(const GroundModel& m, const StrategyTables& t, Mode mode) {
  AgsReport rep;
  Formula fair = fair_formula();
  Formula phi1 = m.prob->spec[0], phi2 = m.prob->spec[1];
  auto run = [&](int slot, Formula f, std::vector<int> refined, const char* tag) {
    rep.cond[slot] = model_check(m, t, f, refined);
    rep.cond[slot].instance = tag;
  };
  switch (mode) {
    case Mode::Ags:
      run(0, mk_implies(mk_and(fair, phi2), phi1), {1}, "i");
      run(1, mk_implies(mk_and(fair, phi1), phi2), {2}, "ii");
      run(2, mk_implies(fair, mk_and(phi1, phi2)), {1, 2}, "iii");
      break;
    case Mode::Cooperative:
      rep.cond[0].vacuous = true;
      rep.cond[0].instance = "i";
      rep.cond[1].vacuous = true;
      rep.cond[1].instance = "ii";
      run(2, mk_implies(fair, mk_and(phi1, phi2)), {1, 2}, "iii");
      break;
    case Mode::Competitive:
      run(0, mk_implies(fair, phi1), {1}, "i");
      run(1, mk_implies(fair, phi2), {2}, "ii");
      rep.cond[2].vacuous = true;
      rep.cond[2].instance = "iii";
      break;
  }
  return rep;
}

std::vector<StrategyTables> brute_force_synthesize(const GroundModel& m, Mode mode,
                                                   int budget_bits,
                                                   uint64_t max_results) {
  int bits = total_table_bits(m);
  if (bits > budget_bits)
    throw budget_error("brute force over " + std::to_string(bits) +
                       " table bits exceeds the budget of " +
                       std::to_string(budget_bits));
  std::vector<StrategyTables> out;
  uint64_t combos = uint64_t(1) << bits;
  for (uint64_t counter = 0; counter < combos; ++counter) {
    StrategyTables t = tables_from_counter(m, counter);
    t.mode = mode_name(mode);
    if (check_solution(m, t, mode).all_hold()) {
      out.push_back(std::move(t));
      if (out.size() >= max_results) break;
    }
  }
  return out;
}

bool replay_counterexample(const GroundModel& m, const StrategyTables& t,
                           const Verdict& v) {
  if (v.holds || v.loop.empty()) return false;
  SystemContext sys(m, t, v.refined);
  auto all = v.stem;
  all.insert(all.end(), v.loop.begin(), v.loop.end());
  for (size_t i = 0; i < all.size(); ++i) {
    const Valuation& g = all[i].global;
    uint64_t x = restrict_to(g, sys.ext).bits();
    Valuation ch = restrict_to(g, sys.choice);
    uint64_t succ = sys.successor(x, ch);
    const Valuation& next =
        (i + 1 < all.size()) ? all[i + 1].global : v.loop.front().global;
    if (restrict_to(next, sys.ext).bits() != succ) return false;
    if (sys.signals(x, ch) != all[i].signals) return false;
  }
  // The signal trace must falsify the checked formula.
  Lasso w;
  for (const auto& s : v.stem) w.stem.push_back(s.signals);
  for (const auto& s : v.loop) w.loop.push_back(s.signals);
  return !eval_ltl_on_lasso(v.formula, w);
}

std::string render_counterexample(const GroundModel& m, const Verdict& v) {
  std::ostringstream out;
  if (v.holds) return "";
  out << "counterexample (condition " << v.instance << "), stem " << v.stem.size()
      << " steps, loop " << v.loop.size() << " steps\n";
  Valuation prev;
  bool have_prev = false;
  size_t idx = 0;
  auto row = [&](const TraceStep& s, const char* phase) {
    out << phase << " " << idx++ << ": sched=p"
        << (s.global.get(kSchedVar) ? "1" : "2");
    std::string inputs, changed;
    for (const auto& slot : s.global.domain()->slots()) {
      if (slot.name == kSchedVar) continue;
      const VarDecl* vd = m.prob->find_var(slot.name);
      bool is_input = vd && vd->kind == VarKind::Input;
      uint64_t val = s.global.get(slot.name);
      if (is_input) {
        inputs += " " + slot.name + "=" + std::to_string(val);
      } else if (!have_prev || prev.get(slot.name) != val) {
        changed += " " + slot.name + "=" + std::to_string(val);
      }
    }
    if (!inputs.empty()) out << " inputs:" << inputs;
    if (!changed.empty()) out << " state:" << changed;
    out << "\n";
    prev = s.global;
    have_prev = true;
  };
  for (const auto& s : v.stem) row(s, "stem");
  for (const auto& s : v.loop) row(s, "loop");
  return out.str();
}

}  // namespace agsynth
