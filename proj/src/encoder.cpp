#include "agsynth/encoder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "agsynth/errors.hpp"

namespace agsynth {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Cooperative: return "coop";
    case Mode::Competitive: return "comp";
    case Mode::Ags: return "ags";
  }
  return "?";
}

Mode mode_from_name(const std::string& s) {
  if (s == "coop" || s == "cooperative") return Mode::Cooperative;
  if (s == "comp" || s == "competitive") return Mode::Competitive;
  if (s == "ags") return Mode::Ags;
  throw semantic_error("unknown mode '" + s + "'");
}

Formula fair_formula() {
  return mk_and(mk_always(mk_eventually(mk_atom("sched_p1"))),
                mk_always(mk_eventually(mk_atom("sched_p2"))));
}

std::vector<std::pair<Formula, std::vector<int>>> mode_instances(
    const SynthesisProblem& p, Mode mode) {
  Formula fair = fair_formula();
  Formula phi1 = p.spec[0], phi2 = p.spec[1];
  switch (mode) {
    case Mode::Cooperative:
      return {{mk_implies(fair, mk_and(phi1, phi2)), {1, 2}}};
    case Mode::Competitive:
      return {{mk_implies(fair, phi1), {1}}, {mk_implies(fair, phi2), {2}}};
    case Mode::Ags:
      return {{mk_implies(mk_and(fair, phi2), phi1), {1}},
              {mk_implies(mk_and(fair, phi1), phi2), {2}},
              {mk_implies(fair, mk_and(phi1, phi2)), {1, 2}}};
  }
  throw internal_error("bad mode");
}

namespace {

int bits_for(uint64_t n) {  // width needed to store values 0..n
  int w = 1;
  while (w < 63 && (n >> w) != 0) ++w;
  return w;
}

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

Sort hole_result_sort(const GroundHole& h) {
  return h.out_width == 1 ? sort_bool() : sort_bv(h.out_width);
}

Term hole_app(const GroundHole& h, uint64_t row) {
  std::vector<Term> args;
  if (h.arg_bits > 0) args.push_back(t_bv(row, h.arg_bits));
  return t_app(h.name, hole_result_sort(h), std::move(args));
}

// app == value as a guard conjunct
Term app_eq(const GroundHole& h, uint64_t row, uint64_t value) {
  Term app = hole_app(h, row);
  if (h.out_width == 1) return value ? app : t_not(app);
  return t_eq(app, t_bv(value, h.out_width));
}

// ---------------------------------------------------------------------------
// Over-approximate sketch reachability: all inputs, controllables and
// (refined) memory updates are free.
// ---------------------------------------------------------------------------

std::vector<uint64_t> overapprox_reachable(const GroundModel& m, const DomainPtr& ext,
                                           const std::vector<int>& refined,
                                           const EncodeOptions& opts) {
  const SynthesisProblem& p = *m.prob;
  std::vector<std::pair<std::string, int>> free_vars;
  for (const auto& s : m.unctrl_input_dom->slots())
    if (s.name != kSchedVar) free_vars.emplace_back(s.name, s.width);
  for (const auto& s : m.ctrl_dom->slots()) free_vars.emplace_back(s.name, s.width);
  auto free_dom = make_domain(free_vars);
  auto free_vals = enumerate_valuations(free_dom, opts.grounding_budget);

  Valuation init(ext);
  for (const auto& vd : p.vars)
    if (vd.kind == VarKind::State) init.set(vd.name, vd.init);

  std::set<uint64_t> seen{init.bits()};
  std::vector<uint64_t> todo{init.bits()}, order{init.bits()};
  while (!todo.empty()) {
    uint64_t xb = todo.back();
    todo.pop_back();
    Valuation x(ext, xb);
    for (int sched = 1; sched <= 2; ++sched) {
      for (const auto& fv : free_vals) {
        EvalEnv env;
        env.var = [&](const std::string& n) -> SVal {
          if (ext->contains(n)) return SVal::of(x.get(n), ext->slot(n).width);
          if (n == kSchedVar) return SVal::of(sched == 1, 1);
          if (free_dom->contains(n)) return SVal::of(fv.get(n), free_dom->slot(n).width);
          if (const SignalDef* sd = p.find_signal(n)) return eval_expr(sd->def, env);
          throw semantic_error("reachability: unknown name '" + n + "'");
        };
        env.hole = [&](const std::string& n) -> SVal {
          const GroundHole* h = m.find_hole(n);
          if (!h || h->role != HoleRole::Control)
            throw semantic_error("reachability: bad hole '?" + n + "'");
          uint64_t packed = 0;
          for (const auto& [on, ow] : h->outputs)
            packed = (packed << ow) | fv.get(on);
          return SVal::of(packed, h->out_width);
        };
        Valuation base(ext, xb);
        for (const auto& vd : p.vars) {
          if (vd.kind != VarKind::State) continue;
          bool writable = vd.owner == Owner::Shared ||
                          (sched == 1 ? vd.owner == Owner::P1 : vd.owner == Owner::P2);
          if (!writable) continue;
          if (const Expr* e = p.procs[sched - 1].assign_for(vd.name))
            base.set(vd.name, eval_expr_concrete(*e, env));
        }
        // Memory of the scheduled process (when refined) updates freely.
        std::vector<std::string> mems;
        if (contains(refined, sched))
          for (const auto& mv : m.mem_vars_of(sched))
            if (ext->contains(mv)) mems.push_back(mv);
        uint64_t combos = uint64_t(1) << mems.size();
        for (uint64_t mb = 0; mb < combos; ++mb) {
          Valuation succ = base;
          for (size_t i = 0; i < mems.size(); ++i)
            succ.set(mems[i], (mb >> (mems.size() - 1 - i)) & 1);
          if (seen.insert(succ.bits()).second) {
            todo.push_back(succ.bits());
            order.push_back(succ.bits());
          }
        }
      }
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

// ---------------------------------------------------------------------------
// Step context: which inputs a composed step reads, which refined holes it
// engages, and the resulting guarded successor branches.
// ---------------------------------------------------------------------------

struct BranchOut {
  uint64_t succ = 0;
  Term guard;                               // split guard, possibly extended
  std::map<std::string, SVal> signals;      // label signals
  int input_index = 0;
  int split_index = 0;
};

class StepContext {
public:
  StepContext(const GroundModel& m, const DomainPtr& ext,
              const std::vector<int>& refined, const std::vector<std::string>& label_sigs,
              const EncodeOptions& opts)
      : m_(m), ext_(ext), refined_(refined), label_sigs_(label_sigs), opts_(opts) {}

  // All guarded branches for one (state, scheduler) pair.
  std::vector<BranchOut> branches(uint64_t xbits, int sched) {
    discover(xbits, sched);

    std::vector<std::pair<std::string, int>> en;
    for (const auto& s : m_.unctrl_input_dom->slots())
      if (s.name != kSchedVar && read_inputs_.count(s.name)) en.emplace_back(s.name, s.width);
    for (const auto& s : m_.ctrl_dom->slots())
      if (read_free_ctrl_.count(s.name)) en.emplace_back(s.name, s.width);
    auto en_dom = make_domain(en);
    auto en_vals = enumerate_valuations(en_dom, opts_.grounding_budget);

    // Split holes: everything whose value feeds the successor state, plus
    // engaged multi-bit holes (their applications cannot stay symbolic).
    std::vector<const GroundHole*> split;
    std::set<std::string> split_names;
    for (const auto& h : m_.holes) {
      bool engaged = engaged_succ_.count(h.name) ||
                     (engaged_label_.count(h.name) && h.out_width > 1);
      if (engaged && split_names.insert(h.name).second) split.push_back(&h);
    }

    std::vector<BranchOut> out;
    int input_index = 0;
    for (const auto& iv : en_vals) {
      uint64_t split_combos = 1;
      for (const auto* h : split) split_combos <<= h->out_width;
      for (uint64_t sc = 0; sc < split_combos; ++sc) {
        // Unpack the split combo, first split hole in the high bits.
        std::map<std::string, uint64_t> split_val;
        {
          int off = 0;
          for (const auto* h : split) off += h->out_width;
          for (const auto* h : split) {
            off -= h->out_width;
            split_val[h->name] = (sc >> off) & ((uint64_t(1) << h->out_width) - 1);
          }
        }
        BranchOut b;
        b.input_index = input_index;
        b.split_index = static_cast<int>(sc);
        Eval ev{*this, Valuation(ext_, xbits), sched, &iv, en_dom, &split_val, nullptr};

        // Successor: frozen, then scheduled assignments, then memory.
        Valuation succ(ext_, xbits);
        for (const auto& vd : m_.prob->vars) {
          if (vd.kind != VarKind::State) continue;
          bool writable = vd.owner == Owner::Shared ||
                          (sched == 1 ? vd.owner == Owner::P1 : vd.owner == Owner::P2);
          if (!writable) continue;
          if (const Expr* e = m_.prob->procs[sched - 1].assign_for(vd.name)) {
            SVal v = eval_expr(*e, ev.env());
            if (!v.concrete)
              throw internal_error("assignment to '" + vd.name +
                                   "' not concrete after splitting");
            succ.set(vd.name, v.bits);
          }
        }
        if (contains(refined_, sched)) {
          auto mems = m_.mem_vars_of(sched);
          if (!mems.empty()) {
            uint64_t mv = split_val.at("mu_p" + std::to_string(sched));
            int off = static_cast<int>(mems.size());
            for (const auto& mn : mems) {
              --off;
              if (ext_->contains(mn)) succ.set(mn, (mv >> off) & 1);
            }
          }
        }
        b.succ = succ.bits();

        // Guard: split equations; hole rows are concrete under this branch.
        std::vector<Term> conj;
        for (const auto* h : split)
          conj.push_back(app_eq(*h, ev.row_of(*h), split_val.at(h->name)));
        b.guard = t_and(conj);

        for (const auto& sn : label_sigs_) {
          if (sn == "sched_p1") { b.signals[sn] = SVal::of(sched == 1, 1); continue; }
          if (sn == "sched_p2") { b.signals[sn] = SVal::of(sched == 2, 1); continue; }
          const SignalDef* sd = m_.prob->find_signal(sn);
          if (!sd) throw semantic_error("label references unknown signal '" + sn + "'");
          b.signals[sn] = eval_expr(sd->def, ev.env());
        }
        out.push_back(std::move(b));
      }
      ++input_index;
    }
    return out;
  }

private:
  // Phase 1: partial evaluation with free inputs as variables, recording the
  // read support and the engaged refined holes.
  void discover(uint64_t xbits, int sched) {
    read_inputs_.clear();
    read_free_ctrl_.clear();
    engaged_succ_.clear();
    engaged_label_.clear();

    Valuation x(ext_, xbits);
    for (int phase = 0; phase < 2; ++phase) {
      bool label_phase = phase == 1;
      Eval ev{*this, x, sched, nullptr, nullptr, nullptr,
              label_phase ? &engaged_label_ : &engaged_succ_};
      if (!label_phase) {
        for (const auto& vd : m_.prob->vars) {
          if (vd.kind != VarKind::State) continue;
          bool writable = vd.owner == Owner::Shared ||
                          (sched == 1 ? vd.owner == Owner::P1 : vd.owner == Owner::P2);
          if (!writable) continue;
          if (const Expr* e = m_.prob->procs[sched - 1].assign_for(vd.name))
            eval_expr(*e, ev.env());
        }
        if (contains(refined_, sched) && !m_.mem_vars_of(sched).empty()) {
          const GroundHole* mu = m_.find_hole("mu_p" + std::to_string(sched));
          ev.engage(*mu);
          ev.chase_obs(*mu);
        }
      } else {
        for (const auto& sn : label_sigs_) {
          if (sn == "sched_p1" || sn == "sched_p2") continue;
          if (const SignalDef* sd = m_.prob->find_signal(sn)) eval_expr(sd->def, ev.env());
        }
      }
    }
  }

  struct Eval {
    StepContext& ctx;
    Valuation x;
    int sched;
    const Valuation* inputs;           // enumerated support (phase 2)
    DomainPtr input_dom;
    std::map<std::string, uint64_t>* split;  // phase 2 split assignment
    std::set<std::string>* engage_set;       // phase 1 recording

    EvalEnv env() {
      EvalEnv e;
      e.var = [this](const std::string& n) { return var(n); };
      e.hole = [this](const std::string& n) { return hole_ref(n); };
      return e;
    }

    void engage(const GroundHole& h) {
      if (engage_set) engage_set->insert(h.name);
    }

    // Observation lists of engaged holes are read when the application row is
    // packed; record their input dependencies during discovery.
    void chase_obs(const GroundHole& h) {
      if (!engage_set) return;
      for (const auto& a : h.args) {
        if (a.name == "mem") continue;
        var(a.name);
      }
    }

    uint64_t row_of(const GroundHole& h) {
      uint64_t packed = 0;
      for (const auto& a : h.args) {
        uint64_t v;
        if (a.name == "mem") {
          v = 0;
          for (const auto& mn : ctx.m_.mem_vars_of(h.process)) {
            SVal s = var(mn);
            if (!s.concrete) throw internal_error("symbolic memory observation");
            v = (v << 1) | s.bits;
          }
        } else {
          SVal s = var(a.name);
          if (!s.concrete)
            throw internal_error("observation '" + a.name + "' not concrete");
          v = s.bits;
        }
        packed = (packed << a.width) | (v & ((uint64_t(1) << a.width) - 1));
      }
      return packed;
    }

    SVal hole_value(const GroundHole& h) {
      bool refined = contains(ctx.refined_, h.process);
      if (!refined) {
        // Grounded universally: the hole's outputs are free variables.
        uint64_t packed = 0;
        bool concrete = true;
        for (const auto& [on, ow] : h.outputs) {
          SVal s = free_ctrl(on, ow);
          concrete = concrete && s.concrete;
          packed = (packed << ow) | (s.concrete ? s.bits : 0);
        }
        if (concrete) return SVal::of(packed, h.out_width);
        return SVal::sym(t_var("#" + h.name, sort_bv(h.out_width)), h.out_width);
      }
      engage(h);
      chase_obs(h);
      if (split) {
        auto it = split->find(h.name);
        if (it != split->end()) return SVal::of(it->second, h.out_width);
        // Label-only boolean hole stays a symbolic application.
        return SVal::sym(hole_app(h, row_of(h)), h.out_width);
      }
      return SVal::sym(t_var("#" + h.name, sort_bv(h.out_width)), h.out_width);
    }

    SVal hole_ref(const std::string& n) {
      const GroundHole* h = ctx.m_.find_hole(n);
      if (!h) throw semantic_error("unknown hole '?" + n + "'");
      return hole_value(*h);
    }

    SVal free_ctrl(const std::string& n, int width) {
      if (engage_set) {  // phase 1: record and stay symbolic
        ctx.read_free_ctrl_.insert(n);
        return SVal::sym(t_var(n, width == 1 ? sort_bool() : sort_bv(width)), width);
      }
      return SVal::of(inputs->get(n), width);
    }

    SVal var(const std::string& n) {
      if (n == kSchedVar) return SVal::of(sched == 1, 1);
      if (ctx.ext_->contains(n)) return SVal::of(x.get(n), ctx.ext_->slot(n).width);
      const VarDecl* vd = ctx.m_.prob->find_var(n);
      if (vd && vd->kind == VarKind::Input) {
        if (ctx.m_.prob->is_controllable(n)) {
          const HoleDecl* hd = ctx.m_.prob->hole_writing(n);
          const GroundHole* h = ctx.m_.find_hole(hd->name);
          if (!contains(ctx.refined_, h->process)) return free_ctrl(n, vd->width);
          SVal packed = hole_value(*h);
          if (packed.concrete) {
            int off = h->out_width;
            for (const auto& [on, ow] : h->outputs) {
              off -= ow;
              if (on == n)
                return SVal::of((packed.bits >> off) & ((uint64_t(1) << ow) - 1),
                                vd->width);
            }
            throw internal_error("missing output slice");
          }
          if (h->outputs.size() == 1) return packed;  // single output, no slicing
          throw internal_error("symbolic slice of multi-output hole '" + h->name + "'");
        }
        // Uncontrollable input.
        if (engage_set) {
          ctx.read_inputs_.insert(n);
          return SVal::sym(t_var(n, vd->width == 1 ? sort_bool() : sort_bv(vd->width)),
                           vd->width);
        }
        return SVal::of(inputs->get(n), vd->width);
      }
      if (vd) {
        throw internal_error("state variable '" + n + "' outside instance domain");
      }
      if (const SignalDef* sd = ctx.m_.prob->find_signal(n))
        return eval_expr(sd->def, env());
      throw semantic_error("unknown name '" + n + "' in step context");
    }
  };

  friend struct Eval;

  const GroundModel& m_;
  DomainPtr ext_;
  std::vector<int> refined_;
  std::vector<std::string> label_sigs_;
  EncodeOptions opts_;
  std::set<std::string> read_inputs_, read_free_ctrl_;
  std::set<std::string> engaged_succ_, engaged_label_;
};

// Signals mentioned by the automaton's transition labels.
std::vector<std::string> label_signals(const Ucw& a) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : a.transitions)
    for (const auto& s : atoms_of(t.label))
      if (seen.insert(s).second) out.push_back(s);
  return out;
}

// Partial propositional evaluation of a label over signal values.
SVal eval_label_partial(const Formula& f, const std::map<std::string, SVal>& sig) {
  switch (f->op) {
    case LtlOp::True: return SVal::of(1, 1);
    case LtlOp::False: return SVal::of(0, 1);
    case LtlOp::Atom: {
      auto it = sig.find(f->atom);
      if (it == sig.end())
        throw internal_error("label signal '" + f->atom + "' missing");
      return it->second;
    }
    case LtlOp::Not: {
      SVal a = eval_label_partial(f->left(), sig);
      if (a.concrete) return SVal::of(!a.bits, 1);
      return SVal::sym(t_not(a.term), 1);
    }
    case LtlOp::And: {
      SVal a = eval_label_partial(f->left(), sig);
      if (a.concrete && !a.bits) return SVal::of(0, 1);
      SVal b = eval_label_partial(f->right(), sig);
      if (a.concrete) return b;
      if (b.concrete) return b.bits ? a : b;
      return SVal::sym(t_and(a.term, b.term), 1);
    }
    case LtlOp::Or: {
      SVal a = eval_label_partial(f->left(), sig);
      if (a.concrete && a.bits) return SVal::of(1, 1);
      SVal b = eval_label_partial(f->right(), sig);
      if (a.concrete) return b;
      if (b.concrete) return b.bits ? b : a;
      return SVal::sym(t_or(a.term, b.term), 1);
    }
    default:
      throw internal_error("temporal operator in label");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ProductDomain build_product_domain(const GroundModel& m, const Formula& spec,
                                   const EncodeOptions& opts) {
  ProductDomain d;
  d.automaton = translate_to_ucw(spec, opts.state_budget);
  d.ext = m.ext_dom;
  d.ext_valuations = enumerate_valuations(m.ext_dom, opts.grounding_budget);
  d.input_valuations = enumerate_valuations(m.unctrl_input_dom, opts.grounding_budget);
  d.initial_q = d.automaton.initial;
  d.initial_x = m.initial_ext();
  d.rank_bound =
      static_cast<uint64_t>(d.automaton.num_states) * d.ext_valuations.size() + 1;
  return d;
}

InstanceEncoding encode_instance(const GroundModel& m, const Formula& spec,
                                 const std::vector<int>& refined, int index,
                                 const std::string& tag, const EncodeOptions& opts) {
  InstanceEncoding inst;
  inst.index = index;
  inst.tag = tag;
  inst.formula = spec;
  inst.refined = refined;
  inst.automaton = translate_to_ucw(spec, opts.state_budget);
  inst.ext = m.ext_dom_for(refined);
  if (inst.ext->total_bits() > opts.grounding_budget)
    throw budget_error("extended state space of instance " + tag + " needs " +
                       std::to_string(inst.ext->total_bits()) + " bits (budget " +
                       std::to_string(opts.grounding_budget) + ")");
  inst.reachable = overapprox_reachable(m, inst.ext, refined, opts);

  Valuation init(inst.ext);
  for (const auto& vd : m.prob->vars)
    if (vd.kind == VarKind::State) init.set(vd.name, vd.init);
  inst.initial_x = init.bits();
  inst.initial_q = inst.automaton.initial;
  inst.rank_bound = static_cast<uint64_t>(inst.automaton.num_states) *
                        (uint64_t(1) << inst.ext->total_bits()) + 1;
  inst.rank_width = bits_for(inst.rank_bound);
  inst.q_width = bits_for(std::max(0, inst.automaton.num_states - 1));
  inst.x_width = std::max(1, inst.ext->total_bits());

  auto sigs = label_signals(inst.automaton);
  StepContext ctx(m, inst.ext, refined, sigs, opts);
  auto outgoing = inst.automaton.outgoing();
  std::vector<int> scc = ucw_scc_of(inst.automaton);
  std::vector<char> scc_rejecting(inst.automaton.num_states + 1, 0);
  {
    std::vector<char> has_rej(inst.automaton.num_states + 1, 0);
    for (int q = 0; q < inst.automaton.num_states; ++q)
      if (inst.automaton.rejecting[q]) has_rej[scc[q]] = 1;
    for (int q = 0; q < inst.automaton.num_states; ++q)
      scc_rejecting[q] = has_rej[scc[q]];
  }

  struct RawEdge {
    int q, q2;
    uint64_t x, x2;
    bool strict, rank_tracked;
    Term guard;
    size_t xi;
    int sched, input_index, split_index, trans_index;
  };
  std::vector<RawEdge> raw;

  for (size_t xi = 0; xi < inst.reachable.size(); ++xi) {
    uint64_t xb = inst.reachable[xi];
    for (int sched = 1; sched <= 2; ++sched) {
      auto branches = ctx.branches(xb, sched);
      for (const auto& b : branches) {
        for (int q = 0; q < inst.automaton.num_states; ++q) {
          for (int ti : outgoing[q]) {
            const auto& tr = inst.automaton.transitions[ti];
            SVal lbl = eval_label_partial(tr.label, b.signals);
            if (lbl.concrete && !lbl.bits) continue;
            Term guard = b.guard;
            if (!lbl.concrete) guard = t_and(guard, lbl.term);
            bool tracked = !opts.scc_rank ||
                           (scc[tr.src] == scc[tr.dst] && scc_rejecting[tr.src]);
            raw.push_back({q, tr.dst, xb, b.succ,
                           static_cast<bool>(inst.automaton.rejecting[tr.dst]), tracked,
                           guard, xi, sched, b.input_index, b.split_index, ti});
          }
        }
      }
    }
  }
  std::stable_sort(raw.begin(), raw.end(), [](const RawEdge& a, const RawEdge& b) {
    return std::tie(a.q, a.xi, a.sched, a.input_index, a.split_index, a.trans_index) <
           std::tie(b.q, b.xi, b.sched, b.input_index, b.split_index, b.trans_index);
  });
  std::set<std::string> seen;
  for (auto& e : raw) {
    // Non-strict self loops assert nothing and cannot close a rejecting cycle.
    if (e.q == e.q2 && e.x == e.x2 && !e.strict) continue;
    std::string key = std::to_string(e.q) + "," + std::to_string(e.x) + ">" +
                      std::to_string(e.q2) + "," + std::to_string(e.x2) +
                      (e.strict ? "!" : "") + (e.rank_tracked ? "#" : "") + "|" +
                      (e.guard ? to_string(e.guard) : "");
    if (!seen.insert(key).second) continue;
    inst.edges.push_back({e.q, e.x, e.q2, e.x2, e.strict, e.rank_tracked, e.guard});
  }
  return inst;
}

namespace {

Term reach_app(const InstanceEncoding& i, int q, uint64_t x) {
  return t_app("reach!" + std::to_string(i.index), sort_bool(),
               {t_bv(q, i.q_width), t_bv(x, i.x_width)});
}

Term rank_app(const InstanceEncoding& i, int q, uint64_t x) {
  return t_app("rank!" + std::to_string(i.index), sort_bv(i.rank_width),
               {t_bv(q, i.q_width), t_bv(x, i.x_width)});
}

}  // namespace

ConstraintSet encode_mode(const GroundModel& m, Mode mode, const EncodeOptions& opts) {
  ConstraintSet c;
  c.problem = m.prob->name;
  c.mode = mode_name(mode);
  c.bound = m.bound;
  c.model = m;

  for (const auto& h : m.holes) {
    FnDecl d;
    d.kind = FnDecl::Kind::Hole;
    d.name = h.name;
    d.hole_name = h.name;
    if (h.arg_bits > 0) d.args.push_back(sort_bv(h.arg_bits));
    d.result = hole_result_sort(h);
    c.decls.push_back(d);
  }

  auto specs = mode_instances(*m.prob, mode);
  int idx = 1;
  for (const auto& [formula, refined] : specs) {
    std::string tag = c.mode + "_" + std::to_string(idx);
    c.instances.push_back(encode_instance(m, formula, refined, idx, tag, opts));
    const InstanceEncoding& inst = c.instances.back();
    FnDecl rb;
    rb.kind = FnDecl::Kind::ReachFlag;
    rb.name = "reach!" + std::to_string(idx);
    rb.args = {sort_bv(inst.q_width), sort_bv(inst.x_width)};
    rb.result = sort_bool();
    rb.instance = idx;
    c.decls.push_back(rb);
    FnDecl rk = rb;
    rk.kind = FnDecl::Kind::Rank;
    rk.name = "rank!" + std::to_string(idx);
    rk.result = sort_bv(inst.rank_width);
    c.decls.push_back(rk);
    ++idx;
  }

  for (const auto& inst : c.instances) {
    c.assertions.push_back(reach_app(inst, inst.initial_q, inst.initial_x));
    for (const auto& e : inst.edges) {
      Term pre = reach_app(inst, e.q, e.x);
      if (e.guard && !(is_const(e.guard) && const_bool(e.guard)))
        pre = t_and(pre, e.guard);
      Term post = reach_app(inst, e.q2, e.x2);
      if (e.rank_tracked) {
        Term cmp = e.strict ? t_ugt(rank_app(inst, e.q2, e.x2), rank_app(inst, e.q, e.x))
                            : t_uge(rank_app(inst, e.q2, e.x2), rank_app(inst, e.q, e.x));
        post = t_and(post, cmp);
      }
      c.assertions.push_back(t_implies(pre, post));
    }
  }
  return c;
}

void encode_cost(ConstraintSet& c, uint64_t opt) {
  if (opt == 0) throw semantic_error("cost bound 0 is vacuously unsatisfiable");
  const GroundModel& m = c.model;
  if (m.costs.empty()) throw semantic_error("problem declares no cost functions");
  uint64_t max_cost = 0;
  for (const auto& cd : m.costs) {
    const GroundHole* h = m.find_hole(cd.hole);
    if (h) max_cost += static_cast<uint64_t>(cd.weight) * h->rows();
  }
  c.max_cost = max_cost;
  int w = bits_for(max_cost + 1) + 1;
  Term sum = t_bv(0, w);
  for (const auto& cd : m.costs) {
    const GroundHole* h = m.find_hole(cd.hole);
    if (!h) continue;
    for (uint64_t row = 0; row < h->rows(); ++row) {
      EvalEnv env;
      env.var = [&](const std::string& n) -> SVal {
        int off = h->arg_bits;
        for (const auto& a : h->args) {
          off -= a.width;
          if (a.name == n)
            return SVal::of((row >> off) & ((uint64_t(1) << a.width) - 1), a.width);
        }
        throw semantic_error("cost predicate reads '" + n + "' outside observations");
      };
      env.hole = [&](const std::string& n) -> SVal {
        if (n != h->name)
          throw semantic_error("cost predicate references foreign hole '?" + n + "'");
        return SVal::sym(hole_app(*h, row), h->out_width);
      };
      SVal pred = eval_expr(cd.pred, env);
      Term cond = pred.as_term();
      if (is_const(cond)) {
        if (const_bool(cond)) sum = t_add(sum, t_bv(cd.weight, w));
        continue;
      }
      sum = t_add(sum, t_ite(cond, t_bv(cd.weight, w), t_bv(0, w)));
    }
  }
  uint64_t bound = std::min<uint64_t>(opt, max_cost + 1);
  Term frag = t_ult(sum, t_bv(bound, w));
  c.extra.push_back(frag);
  c.assertions.push_back(frag);
}

}  // namespace agsynth
