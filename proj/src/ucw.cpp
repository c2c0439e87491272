#include "agsynth/ucw.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

std::vector<std::vector<int>> Ucw::outgoing() const {
  std::vector<std::vector<int>> idx(num_states);
  for (size_t i = 0; i < transitions.size(); ++i)
    idx[transitions[i].src].push_back(static_cast<int>(i));
  return idx;
}

bool eval_label(const Formula& label, const SignalValuation& v) {
  switch (label->op) {
    case LtlOp::True: return true;
    case LtlOp::False: return false;
    case LtlOp::Atom: {
      auto it = v.find(label->atom);
      if (it == v.end())
        throw semantic_error("valuation does not assign signal '" + label->atom + "'");
      return it->second;
    }
    case LtlOp::Not: return !eval_label(label->left(), v);
    case LtlOp::And: return eval_label(label->left(), v) && eval_label(label->right(), v);
    case LtlOp::Or: return eval_label(label->left(), v) || eval_label(label->right(), v);
    case LtlOp::Implies: return !eval_label(label->left(), v) || eval_label(label->right(), v);
    case LtlOp::Iff: return eval_label(label->left(), v) == eval_label(label->right(), v);
    default:
      throw semantic_error("temporal operator in transition label: " + to_string(label));
  }
}

std::vector<int> ucw_successors(const Ucw& a, int q, const SignalValuation& v) {
  if (q < 0 || q >= a.num_states) throw semantic_error("state out of range");
  std::set<int> out;
  for (const auto& t : a.transitions)
    if (t.src == q && eval_label(t.label, v)) out.insert(t.dst);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Tableau construction (expand/cover) on the NNF of the negated formula.
// ---------------------------------------------------------------------------

namespace {

std::vector<int> scc_of(int n, const std::vector<std::vector<int>>& adj);

struct IdLess {
  bool operator()(const Formula& a, const Formula& b) const { return a->id < b->id; }
};
using FSet = std::set<Formula, IdLess>;

bool is_literal(const Formula& f) {
  return f->op == LtlOp::Atom ||
         (f->op == LtlOp::Not && f->left()->op == LtlOp::Atom);
}

Formula literal_dual(const Formula& f) {
  return f->op == LtlOp::Not ? f->left() : mk_not(f);
}

struct TableauNode {
  std::set<int> incoming;  // node ids; -1 stands for the virtual init
  FSet neu, old, next;
};

class Tableau {
public:
  Tableau(const Formula& nnf, int budget) : budget_(budget) {
    TableauNode start;
    start.incoming.insert(-1);
    if (nnf->op != LtlOp::True) start.neu.insert(nnf);
    expand(std::move(start));
    while (!pending_.empty()) {
      TableauNode n = std::move(pending_.back());
      pending_.pop_back();
      expand(std::move(n));
    }
  }

  // Finished nodes in creation order; node id == index.
  std::vector<TableauNode> done;

private:
  void expand(TableauNode node) {
    if (node.neu.empty()) {
      for (size_t i = 0; i < done.size(); ++i) {
        if (done[i].old == node.old && done[i].next == node.next) {
          done[i].incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      }
      if (static_cast<int>(done.size()) >= budget_)
        throw budget_error("automaton state budget (" + std::to_string(budget_) +
                           ") exhausted during translation");
      int id = static_cast<int>(done.size());
      done.push_back(node);
      TableauNode succ;
      succ.incoming.insert(id);
      succ.neu = node.next;
      pending_.push_back(std::move(succ));
      return;
    }

    Formula f = *node.neu.begin();
    node.neu.erase(node.neu.begin());

    switch (f->op) {
      case LtlOp::True:
        node.old.insert(f);  // recorded: until-fulfilment checks membership
        expand(std::move(node));
        return;
      case LtlOp::False:
        return;  // inconsistent branch
      case LtlOp::Atom:
      case LtlOp::Not:
        if (!is_literal(f))
          throw internal_error("tableau input not in NNF: " + to_string(f));
        if (node.old.count(literal_dual(f))) return;
        node.old.insert(f);
        expand(std::move(node));
        return;
      case LtlOp::And: {
        node.old.insert(f);
        if (!node.old.count(f->left())) node.neu.insert(f->left());
        if (!node.old.count(f->right())) node.neu.insert(f->right());
        expand(std::move(node));
        return;
      }
      case LtlOp::Or: {
        node.old.insert(f);
        TableauNode n1 = node;
        if (!n1.old.count(f->left())) n1.neu.insert(f->left());
        TableauNode n2 = std::move(node);
        if (!n2.old.count(f->right())) n2.neu.insert(f->right());
        expand(std::move(n1));
        expand(std::move(n2));
        return;
      }
      case LtlOp::Next: {
        node.old.insert(f);
        node.next.insert(f->left());
        expand(std::move(node));
        return;
      }
      case LtlOp::Until: {
        node.old.insert(f);
        TableauNode n1 = node;  // defer: left now, f again next
        if (!n1.old.count(f->left())) n1.neu.insert(f->left());
        n1.next.insert(f);
        TableauNode n2 = std::move(node);  // fulfill: right now
        if (!n2.old.count(f->right())) n2.neu.insert(f->right());
        expand(std::move(n1));
        expand(std::move(n2));
        return;
      }
      case LtlOp::Release: {
        node.old.insert(f);
        TableauNode n1 = node;  // defer: right now, f again next
        if (!n1.old.count(f->right())) n1.neu.insert(f->right());
        n1.next.insert(f);
        TableauNode n2 = std::move(node);  // settle: both now
        if (!n2.old.count(f->left())) n2.neu.insert(f->left());
        if (!n2.old.count(f->right())) n2.neu.insert(f->right());
        expand(std::move(n1));
        expand(std::move(n2));
        return;
      }
      default:
        throw internal_error("tableau input not in NNF: " + to_string(f));
    }
  }

  int budget_;
  std::vector<TableauNode> pending_;
};

void collect_untils(const Formula& f, FSet& out) {
  if (f->op == LtlOp::Until) out.insert(f);
  for (const auto& c : f->children) collect_untils(c, out);
}

Formula label_of(const TableauNode& n) {
  std::vector<Formula> lits;
  for (const auto& f : n.old)
    if (is_literal(f)) lits.push_back(f);
  return mk_and(lits);
}

struct RawAutomaton {
  int num_states = 0;
  int initial = 0;
  std::vector<UcwTransition> transitions;
  std::vector<bool> marked;  // Buechi-accepting, i.e. UCW-rejecting
};

// Iterated merge of states with identical mark and outgoing edges; this is a
// coarse bisimulation quotient and preserves the automaton language.
void merge_equal_states(RawAutomaton& a) {
  for (;;) {
    std::map<std::string, int> sig_to_rep;
    std::vector<int> rep(a.num_states);
    for (int q = 0; q < a.num_states; ++q) {
      std::set<std::pair<uint64_t, int>> edges;
      for (const auto& t : a.transitions)
        if (t.src == q) edges.insert({t.label->id, t.dst});
      std::ostringstream sig;
      sig << (a.marked[q] ? 'R' : '-');
      for (auto& [lid, dst] : edges) sig << ' ' << lid << '>' << dst;
      auto [it, fresh] = sig_to_rep.emplace(sig.str(), q);
      rep[q] = it->second;
      (void)fresh;
    }
    bool changed = false;
    for (int q = 0; q < a.num_states; ++q)
      if (rep[q] != q) changed = true;
    if (!changed) return;

    std::vector<int> newid(a.num_states, -1);
    int next = 0;
    for (int q = 0; q < a.num_states; ++q)
      if (rep[q] == q) newid[q] = next++;
    for (int q = 0; q < a.num_states; ++q) newid[q] = newid[rep[q]];

    RawAutomaton b;
    b.num_states = next;
    b.initial = newid[a.initial];
    b.marked.assign(next, false);
    for (int q = 0; q < a.num_states; ++q)
      if (a.marked[q]) b.marked[newid[q]] = true;
    std::set<std::tuple<int, uint64_t, int>> seen;
    for (const auto& t : a.transitions) {
      auto key = std::make_tuple(newid[t.src], t.label->id, newid[t.dst]);
      if (seen.insert(key).second)
        b.transitions.push_back({newid[t.src], t.label, newid[t.dst]});
    }
    a = std::move(b);
  }
}

// Keeps only states reachable from the initial state; renumbers BFS-first so
// output is deterministic.
void prune_unreachable(RawAutomaton& a) {
  std::vector<int> order;
  std::vector<int> newid(a.num_states, -1);
  order.push_back(a.initial);
  newid[a.initial] = 0;
  auto out = std::vector<std::vector<const UcwTransition*>>(a.num_states);
  for (const auto& t : a.transitions) out[t.src].push_back(&t);
  for (size_t i = 0; i < order.size(); ++i) {
    for (const auto* t : out[order[i]]) {
      if (newid[t->dst] < 0) {
        newid[t->dst] = static_cast<int>(order.size());
        order.push_back(t->dst);
      }
    }
  }
  RawAutomaton b;
  b.num_states = static_cast<int>(order.size());
  b.initial = 0;
  b.marked.assign(b.num_states, false);
  for (int q = 0; q < a.num_states; ++q)
    if (newid[q] >= 0 && a.marked[q]) b.marked[newid[q]] = true;
  for (const auto& t : a.transitions)
    if (newid[t.src] >= 0 && newid[t.dst] >= 0)
      b.transitions.push_back({newid[t.src], t.label, newid[t.dst]});
  a = std::move(b);
}

// Drops states from which no marked state is reachable. Runs confined to such
// states can never contribute another rejecting visit, so UCW acceptance is
// unchanged; products downstream shrink considerably.
void trim_to_rejecting_core(RawAutomaton& a) {
  std::vector<char> keep(a.num_states, 0);
  std::vector<int> stack;
  for (int q = 0; q < a.num_states; ++q)
    if (a.marked[q]) {
      keep[q] = 1;
      stack.push_back(q);
    }
  std::vector<std::vector<int>> preds(a.num_states);
  for (const auto& t : a.transitions) preds[t.dst].push_back(t.src);
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : preds[q])
      if (!keep[p]) {
        keep[p] = 1;
        stack.push_back(p);
      }
  }
  keep[a.initial] = 1;  // the initial state always stays
  std::vector<int> newid(a.num_states, -1);
  int next = 0;
  for (int q = 0; q < a.num_states; ++q)
    if (keep[q]) newid[q] = next++;
  RawAutomaton b;
  b.num_states = next;
  b.initial = newid[a.initial];
  b.marked.assign(next, false);
  for (int q = 0; q < a.num_states; ++q)
    if (keep[q] && a.marked[q]) b.marked[newid[q]] = true;
  for (const auto& t : a.transitions)
    if (keep[t.src] && keep[t.dst])
      b.transitions.push_back({newid[t.src], t.label, newid[t.dst]});
  a = std::move(b);
}

}  // namespace

Ucw translate_to_ucw(const Formula& f, int state_budget) {
  Formula neg = negate_nnf(f);
  Tableau tab(neg, state_budget);

  // Generalized Buechi acceptance: one set per until subformula u = a U b,
  // containing the nodes where u is absent or b has been fulfilled.
  FSet untils;
  collect_untils(neg, untils);
  int k = static_cast<int>(untils.size());
  int n = static_cast<int>(tab.done.size());

  // Base automaton: tableau nodes plus an explicit initial state (id n).
  std::vector<std::vector<char>> in_fset(std::max(k, 1), std::vector<char>(n + 1, 0));
  {
    int fi = 0;
    for (const auto& u : untils) {
      for (int q = 0; q < n; ++q)
        in_fset[fi][q] = !tab.done[q].old.count(u) || tab.done[q].old.count(u->right());
      in_fset[fi][n] = 0;
      ++fi;
    }
  }

  std::vector<UcwTransition> base_edges;
  for (int q = 0; q < n; ++q) {
    Formula lbl = label_of(tab.done[q]);
    for (int m : tab.done[q].incoming)
      base_edges.push_back({m < 0 ? n : m, lbl, q});
  }

  RawAutomaton aut;
  if (k <= 1) {
    aut.num_states = n + 1;
    aut.initial = n;
    aut.transitions = base_edges;
    aut.marked.assign(n + 1, false);
    if (k == 0) {
      // No until obligations: every infinite run of the Buechi automaton is
      // accepting. Every infinite run eventually cycles, so marking exactly
      // the states on cycles captures the same language and leaves automata
      // for valid formulas with an empty rejecting set.
      std::vector<std::vector<int>> adj(n + 1);
      for (const auto& t : aut.transitions) adj[t.src].push_back(t.dst);
      std::vector<int> comp = scc_of(n + 1, adj);
      std::vector<int> size(n + 2, 0);
      for (int q = 0; q <= n; ++q) ++size[comp[q]];
      std::vector<char> cyc(n + 2, 0);
      for (int q = 0; q <= n; ++q)
        for (int d : adj[q])
          if (comp[d] == comp[q] && (d == q || size[comp[q]] > 1)) cyc[comp[q]] = 1;
      for (int q = 0; q <= n; ++q) aut.marked[q] = cyc[comp[q]];
    } else {
      for (int q = 0; q <= n; ++q) aut.marked[q] = in_fset[0][q];
    }
  } else {
    // Counter degeneralization: state (q, i) waits for acceptance set i; the
    // counter advances when the source state lies in set i. Accepting states
    // are those in set 0 with counter 0. Only reachable pairs are built.
    auto out = std::vector<std::vector<const UcwTransition*>>(n + 1);
    for (const auto& t : base_edges) out[t.src].push_back(&t);
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> order;
    auto get_id = [&](int q, int i) {
      auto [it, fresh] = ids.emplace(std::make_pair(q, i), static_cast<int>(order.size()));
      if (fresh) {
        order.emplace_back(q, i);
        if (static_cast<int>(order.size()) > state_budget)
          throw budget_error("automaton state budget (" + std::to_string(state_budget) +
                             ") exhausted during degeneralization");
      }
      return it->second;
    };
    int init = get_id(n, 0);
    for (size_t pos = 0; pos < order.size(); ++pos) {
      auto [q, i] = order[pos];
      int j = in_fset[i][q] ? (i + 1) % k : i;
      int src_id = get_id(q, i);
      for (const auto* t : out[q]) {
        int dst_id = get_id(t->dst, j);
        aut.transitions.push_back({src_id, t->label, dst_id});
      }
    }
    aut.num_states = static_cast<int>(order.size());
    aut.initial = init;
    aut.marked.assign(aut.num_states, false);
    for (int s = 0; s < aut.num_states; ++s)
      aut.marked[s] = order[s].second == 0 && in_fset[0][order[s].first];
  }

  prune_unreachable(aut);
  merge_equal_states(aut);
  trim_to_rejecting_core(aut);
  prune_unreachable(aut);

  Ucw result;
  result.num_states = aut.num_states;
  result.initial = aut.initial;
  result.transitions = std::move(aut.transitions);
  result.rejecting.assign(aut.marked.begin(), aut.marked.end());
  std::sort(result.transitions.begin(), result.transitions.end(),
            [](const UcwTransition& a, const UcwTransition& b) {
              return std::tie(a.src, a.label->id, a.dst) <
                     std::tie(b.src, b.label->id, b.dst);
            });
  return result;
}

// ---------------------------------------------------------------------------
// Run analysis
// ---------------------------------------------------------------------------

namespace {

// Iterative Tarjan over an explicit adjacency list.
std::vector<int> scc_of(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;

  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      if (fr.child < adj[fr.v].size()) {
        int w = adj[fr.v][fr.child++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
      } else {
        int v = fr.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == index[v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == v) break;
          }
          ++next_comp;
        }
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<int> ucw_scc_of(const Ucw& a) {
  std::vector<std::vector<int>> adj(a.num_states);
  for (const auto& t : a.transitions) adj[t.src].push_back(t.dst);
  return scc_of(a.num_states, adj);
}

bool accepts_lasso(const Ucw& a, const Lasso& w) {
  if (w.loop.empty()) throw semantic_error("lasso loop must be nonempty");
  auto out = a.outgoing();

  // Run frontier after consuming the stem.
  std::set<int> frontier{a.initial};
  for (const auto& sigma : w.stem) {
    std::set<int> next;
    for (int q : frontier)
      for (int ti : out[q])
        if (eval_label(a.transitions[ti].label, sigma)) next.insert(a.transitions[ti].dst);
    frontier = std::move(next);
  }

  // Loop unrolling graph over (state, loop position).
  int L = static_cast<int>(w.loop.size());
  int nn = a.num_states * L;
  auto node = [&](int q, int i) { return q * L + i; };
  std::vector<std::vector<int>> adj(nn);
  for (int i = 0; i < L; ++i)
    for (int q = 0; q < a.num_states; ++q)
      for (int ti : out[q])
        if (eval_label(a.transitions[ti].label, w.loop[i]))
          adj[node(q, i)].push_back(node(a.transitions[ti].dst, (i + 1) % L));

  std::vector<char> reach(nn, 0);
  std::vector<int> stack;
  for (int q : frontier) {
    reach[node(q, 0)] = 1;
    stack.push_back(node(q, 0));
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!reach[u]) {
        reach[u] = 1;
        stack.push_back(u);
      }
  }

  std::vector<int> comp = scc_of(nn, adj);
  std::vector<char> has_cycle(nn ? *std::max_element(comp.begin(), comp.end()) + 1 : 0, 0);
  {
    std::vector<int> size(has_cycle.size(), 0);
    for (int v = 0; v < nn; ++v) ++size[comp[v]];
    for (int v = 0; v < nn; ++v)
      for (int u : adj[v])
        if (comp[u] == comp[v] && (u == v || size[comp[v]] > 1)) has_cycle[comp[v]] = 1;
  }
  for (int v = 0; v < nn; ++v) {
    int q = v / L;
    if (reach[v] && a.rejecting[q] && has_cycle[comp[v]]) return false;
  }
  return true;
}

std::string to_dot(const Ucw& a) {
  std::ostringstream out;
  out << "digraph ucw {\n  rankdir=LR;\n  node [shape=circle];\n";
  out << "  init [shape=point];\n  init -> q" << a.initial << ";\n";
  for (int q = 0; q < a.num_states; ++q)
    if (a.rejecting[q]) out << "  q" << q << " [shape=doublecircle];\n";
  for (const auto& t : a.transitions)
    out << "  q" << t.src << " -> q" << t.dst << " [label=\"" << to_string(t.label)
        << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace agsynth
