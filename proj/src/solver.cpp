#include "agsynth/solver.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "agsynth/errors.hpp"
#include "agsynth/smtlib.hpp"
#include "agsynth/strategy.hpp"

namespace agsynth {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::Unknown: return "unknown";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Crashed: return "crashed";
  }
  return "?";
}

namespace {

bool is_executable(const std::string& path) {
  return !path.empty() && access(path.c_str(), X_OK) == 0;
}

std::string which(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return "";
  std::istringstream in(path);
  std::string dir;
  while (std::getline(in, dir, ':')) {
    std::string cand = dir + "/" + name;
    if (is_executable(cand)) return cand;
  }
  return "";
}

std::string exe_dir() {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "";
  buf[n] = 0;
  std::string p(buf);
  size_t slash = p.rfind('/');
  return slash == std::string::npos ? "" : p.substr(0, slash);
}

}  // namespace

std::string find_solver_executable(const std::string& configured) {
  if (const char* env = std::getenv("AGSYNTH_SOLVER")) {
    if (is_executable(env)) return env;
    std::string on_path = which(env);
    if (!on_path.empty()) return on_path;
    throw solver_error(std::string("AGSYNTH_SOLVER points to '") + env +
                       "' which is not executable");
  }
  if (!configured.empty()) {
    if (is_executable(configured)) return configured;
    std::string on_path = which(configured);
    if (!on_path.empty()) return on_path;
    throw solver_error("configured solver '" + configured + "' is not executable");
  }
  std::string z3 = which("z3");
  if (!z3.empty()) return z3;
  std::string dir = exe_dir();
  for (const char* rel : {"/../tools/z3shim/z3wasm", "/../../tools/z3shim/z3wasm",
                          "/tools/z3shim/z3wasm"}) {
    if (is_executable(dir + rel)) return dir + rel;
  }
  throw solver_error(
      "no SMT solver found: set AGSYNTH_SOLVER, pass --solver, or install z3 "
      "(the bundled tools/z3shim/z3wasm needs `npm install` in tools/z3shim)");
}

SolverResult solve(const std::string& script, const SolverConfig& cfg) {
  SolverResult res;
  std::string exe = find_solver_executable(cfg.executable);

  std::string script_path;
  if (!cfg.via_stdin || cfg.keep_artifacts) {
    std::string stem = cfg.artifact_stem.empty() ? "agsynth" : cfg.artifact_stem;
    script_path = cfg.workdir + "/" + stem + ".smt2";
    if (!cfg.keep_artifacts)
      script_path = cfg.workdir + "/." + stem + "." + std::to_string(getpid()) + ".smt2";
    std::ofstream out(script_path);
    if (!out) throw solver_error("cannot write solver input file " + script_path);
    out << script;
  }

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe))
    throw solver_error("pipe() failed");

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw solver_error("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(exe.c_str()));
    for (const auto& a : cfg.args) argv.push_back(const_cast<char*>(a.c_str()));
    if (!cfg.via_stdin) argv.push_back(const_cast<char*>(script_path.c_str()));
    argv.push_back(nullptr);
    execvp(exe.c_str(), argv.data());
    perror("execvp");
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  if (cfg.via_stdin) {
    size_t off = 0;
    while (off < script.size()) {
      ssize_t n = write(in_pipe[1], script.data() + off, script.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
  }
  close(in_pipe[1]);

  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);
  std::string out_text, err_text;
  bool timed_out = false;
  int status = 0;
  for (;;) {
    char buf[65536];
    ssize_t n;
    while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0) out_text.append(buf, n);
    while ((n = read(err_pipe[0], buf, sizeof(buf))) > 0) err_text.append(buf, n);
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > cfg.timeout_seconds) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      timed_out = true;
      break;
    }
    usleep(5000);
  }
  {
    char buf[65536];
    ssize_t n;
    while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0) out_text.append(buf, n);
    while ((n = read(err_pipe[0], buf, sizeof(buf))) > 0) err_text.append(buf, n);
  }
  close(out_pipe[0]);
  close(err_pipe[0]);
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!cfg.keep_artifacts && !script_path.empty()) unlink(script_path.c_str());

  if (timed_out) {
    res.status = SolveStatus::Timeout;
    res.diagnostics = "timeout after " + std::to_string(cfg.timeout_seconds) + "s";
    return res;
  }

  // First sat/unsat/unknown token decides the status.
  std::istringstream lines(out_text);
  std::string line;
  res.status = SolveStatus::Crashed;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line == "sat") { res.status = SolveStatus::Sat; break; }
    if (line == "unsat") { res.status = SolveStatus::Unsat; break; }
    if (line == "unknown") { res.status = SolveStatus::Unknown; break; }
  }
  if (res.status == SolveStatus::Sat) res.model_text = out_text;
  if (res.status == SolveStatus::Crashed) {
    res.diagnostics = "exit status " + std::to_string(WEXITSTATUS(status)) +
                      "; stderr: " + err_text + "; stdout: " + out_text.substr(0, 2000);
  } else if (!err_text.empty()) {
    res.diagnostics = err_text;
  }
  return res;
}

StrategyTables extract_tables(const SolverResult& r, const ConstraintSet& c) {
  if (r.status != SolveStatus::Sat)
    throw extraction_error("extract_tables on a non-sat result");
  auto values = parse_model_values(r.model_text);
  StrategyTables t;
  t.bound = c.bound;
  t.mode = c.mode;
  for (const auto& h : c.model.holes) {
    HoleTable table;
    for (uint64_t row = 0; row < h.rows(); ++row) {
      auto it = values.find({h.name, h.arg_bits > 0 ? row : 0});
      if (it == values.end())
        throw extraction_error("model misses entry " + std::to_string(row) +
                               " of hole '" + h.name + "'");
      table.rows.push_back(it->second);
    }
    t.tables[h.name] = std::move(table);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Enumerative oracle
// ---------------------------------------------------------------------------

namespace {

// Assigns table bits from a packed counter, hole by hole in declaration
// order, rows in ascending order, first output bit highest within a row.
Interpretation interpretation_of(const GroundModel& m, uint64_t counter, int total_bits) {
  Interpretation interp;
  int pos = total_bits;
  for (const auto& h : m.holes) {
    for (uint64_t row = 0; row < h.rows(); ++row) {
      pos -= h.out_width;
      uint64_t v = (counter >> pos) & ((uint64_t(1) << h.out_width) - 1);
      interp.values[{h.name, h.arg_bits > 0 ? row : 0}] = v;
    }
  }
  return interp;
}

std::string render_model(const GroundModel& m, const Interpretation& interp) {
  std::ostringstream out;
  out << "sat\n";
  for (const auto& h : m.holes) {
    for (uint64_t row = 0; row < h.rows(); ++row) {
      uint64_t v = interp.values.at({h.name, h.arg_bits > 0 ? row : 0});
      out << "(((" << h.name;
      if (h.arg_bits > 0) {
        out << " #b";
        for (int i = h.arg_bits - 1; i >= 0; --i) out << ((row >> i) & 1);
      }
      out << ") ";
      if (h.out_width == 1) out << (v ? "true" : "false");
      else {
        out << "#b";
        for (int i = h.out_width - 1; i >= 0; --i) out << ((v >> i) & 1);
      }
      out << "))\n";
    }
  }
  return out.str();
}

// Tarjan SCC over a compact adjacency structure.
std::vector<int> scc_of(int n, const std::vector<std::vector<int>>& adj) {
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
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
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

SolverResult enumerative_check_sat(const ConstraintSet& c, int budget_bits) {
  const GroundModel& m = c.model;
  int total_bits = total_table_bits(m);
  if (total_bits > budget_bits)
    throw budget_error("enumeration over " + std::to_string(total_bits) +
                       " table bits exceeds the budget of " + std::to_string(budget_bits));

  auto start = std::chrono::steady_clock::now();

  // Pre-index per instance: pair ids and edges with resolved endpoints.
  struct Graph {
    std::map<std::pair<int, uint64_t>, int> ids;
    std::vector<std::pair<int, uint64_t>> nodes;
    int initial = -1;
    struct E { int src, dst; bool strict; Term guard; };
    std::vector<E> edges;
  };
  std::vector<Graph> graphs;
  for (const auto& inst : c.instances) {
    Graph g;
    auto id_of = [&](int q, uint64_t x) {
      auto [it, fresh] = g.ids.emplace(std::make_pair(q, x), (int)g.nodes.size());
      if (fresh) g.nodes.emplace_back(q, x);
      return it->second;
    };
    g.initial = id_of(inst.initial_q, inst.initial_x);
    for (const auto& e : inst.edges)
      g.edges.push_back({id_of(e.q, e.x), id_of(e.q2, e.x2), e.strict, e.guard});
    graphs.push_back(std::move(g));
  }

  uint64_t combos = total_bits >= 64 ? 0 : (uint64_t(1) << total_bits);
  for (uint64_t counter = 0; counter < combos; ++counter) {
    Interpretation interp = interpretation_of(m, counter, total_bits);

    bool ok = true;
    for (const auto& extra : c.extra)
      ok = ok && eval_term(extra, interp) != 0;

    for (size_t gi = 0; ok && gi < graphs.size(); ++gi) {
      const Graph& g = graphs[gi];
      int n = static_cast<int>(g.nodes.size());
      std::vector<std::vector<int>> adj(n);
      std::vector<std::tuple<int, int, bool>> live;  // src, dst, strict
      for (const auto& e : g.edges) {
        bool on = !e.guard || eval_term(e.guard, interp) != 0;
        if (!on) continue;
        adj[e.src].push_back(e.dst);
        if (e.strict) live.emplace_back(e.src, e.dst, true);
      }
      // Reachability from the initial pair.
      std::vector<char> reach(n, 0);
      std::vector<int> stack{g.initial};
      reach[g.initial] = 1;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : adj[v])
          if (!reach[u]) { reach[u] = 1; stack.push_back(u); }
      }
      // An annotation exists iff no reachable cycle passes a strict edge.
      std::vector<int> comp = scc_of(n, adj);
      for (const auto& [src, dst, strict] : live) {
        (void)strict;
        if (reach[src] && comp[src] == comp[dst]) { ok = false; break; }
      }
    }

    if (ok) {
      SolverResult res;
      res.status = SolveStatus::Sat;
      res.model_text = render_model(m, interp);
      res.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return res;
    }
  }
  SolverResult res;
  res.status = SolveStatus::Unsat;
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace agsynth
