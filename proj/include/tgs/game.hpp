#pragma once

// The safety game over the quotient: depth-first tree search pruned by a
// well-quasi-order on nodes, good/bad labeling split over the
// controller/environment action partition, and extraction of an executable
// strategy graph.

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tgs/ata.hpp"
#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/program.hpp"
#include "tgs/quotient.hpp"
#include "tgs/region.hpp"

namespace tgs::game {

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Monotone domination: an order-preserving injection of the classes of `a`
// into the classes of `b` under letter-set inclusion. Greedy earliest-match
// decides it.
inline bool word_leq(const region::CanonicalWord& a,
                     const region::CanonicalWord& b) {
  std::size_t j = 0;
  for (const auto& cls : a.classes) {
    while (j < b.classes.size() &&
           !std::includes(b.classes[j].begin(), b.classes[j].end(),
                          cls.begin(), cls.end()))
      ++j;
    if (j == b.classes.size()) return false;
    ++j;
  }
  return true;
}

// Powerset lifting of word domination. Hoare (default): every word of the
// earlier set is dominated by some word of the later. Smyth: every word of
// the later set dominates some word of the earlier.
inline bool set_leq(const std::set<region::CanonicalWord>& c1,
                    const std::set<region::CanonicalWord>& c2, bool smyth) {
  if (smyth) {
    for (const auto& h2 : c2) {
      bool hit = false;
      for (const auto& h : c1) hit = hit || word_leq(h, h2);
      if (!hit) return false;
    }
    return true;
  }
  for (const auto& h : c1) {
    bool hit = false;
    for (const auto& h2 : c2) hit = hit || word_leq(h, h2);
    if (!hit) return false;
  }
  return true;
}

// Node domination: equal fluents, equal remaining program, equal liveness of
// the specification, and dominated word-set.
inline bool leq_d(const quotient::QuotientState& a,
                  const quotient::QuotientState& b, bool smyth) {
  return a.fluents == b.fluents && a.spec_dead == b.spec_dead &&
         prog::equals(a.rho, b.rho) && set_leq(a.words, b.words, smyth);
}

enum class Label { Pending, Good, Bad };

struct Options {
  bool smyth = false;      // powerset order direction; default Hoare
  bool universal = false;  // label every child universally, ignoring owners
  std::size_t node_budget = 200000;
};

struct GameNode {
  quotient::QuotientState state;
  int parent = -1;
  int depth = 0;
  Label label = Label::Pending;
  bool expanded = false;
  bool pruned = false;
  int prune_to = -1;  // dominating ancestor when pruned

  struct ChildEdge {
    quotient::SymbolicAction sym;
    Owner owner = Owner::Controller;
    int node = -1;
  };
  std::vector<ChildEdge> children;
};

struct Stats {
  std::size_t nodes_expanded = 0;
  std::size_t nodes_pruned = 0;
  std::size_t max_depth = 0;
  double wall_time = 0.0;  // seconds
};

struct SolveResult {
  bool controllable = false;
  std::vector<GameNode> nodes;  // index 0 is the root
  Stats stats;
};

// Depth-first expansion with deterministic child order (action name, then
// remainder print). A bad node is not expanded; a node dominated by a strict
// ancestor is pruned good with a link to that ancestor; otherwise the label
// aggregates the children: any bad environment child poisons the node, a
// final node needs all environment children good, and a non-final node
// additionally needs either an environment move or a good controller move.
inline SolveResult solve(const ground::GroundTheory& theory,
                         const prog::NodePtr& program, const ata::Ata& a,
                         const Options& opt = {}) {
  SolveResult res;
  const auto t0 = std::chrono::steady_clock::now();

  GameNode root;
  root.state = quotient::initial_node(theory, program, a);
  res.nodes.push_back(std::move(root));

  std::function<void(int)> visit = [&](int idx) {
    res.stats.max_depth = std::max(
        res.stats.max_depth, static_cast<std::size_t>(res.nodes[idx].depth));

    if (quotient::is_bad(res.nodes[idx].state, a)) {
      res.nodes[idx].label = Label::Bad;
      return;
    }

    // Strict-ancestor domination prunes the node as good.
    for (int anc = res.nodes[idx].parent; anc != -1;
         anc = res.nodes[anc].parent) {
      if (leq_d(res.nodes[anc].state, res.nodes[idx].state, opt.smyth)) {
        res.nodes[idx].label = Label::Good;
        res.nodes[idx].pruned = true;
        res.nodes[idx].prune_to = anc;
        res.stats.nodes_pruned += 1;
        return;
      }
    }

    auto succ = quotient::successors(res.nodes[idx].state, theory, a);
    std::stable_sort(succ.begin(), succ.end(),
                     [&](const auto& x, const auto& y) {
                       const std::string& nx =
                           theory.actions.at(x.first.action).name;
                       const std::string& ny =
                           theory.actions.at(y.first.action).name;
                       if (nx != ny) return nx < ny;
                       return prog::to_string(x.second.rho, theory) <
                              prog::to_string(y.second.rho, theory);
                     });
    res.stats.nodes_expanded += 1;
    res.nodes[idx].expanded = true;

    for (auto& [sym, state] : succ) {
      if (res.nodes.size() >= opt.node_budget)
        throw BudgetError("game tree exceeds " +
                          std::to_string(opt.node_budget) +
                          " nodes; raise the budget");
      GameNode child;
      child.state = std::move(state);
      child.parent = idx;
      child.depth = res.nodes[idx].depth + 1;
      int ci = static_cast<int>(res.nodes.size());
      GameNode::ChildEdge edge;
      edge.sym = sym;
      edge.owner = theory.actions.at(sym.action).owner;
      edge.node = ci;
      res.nodes[idx].children.push_back(std::move(edge));
      res.nodes.push_back(std::move(child));
      visit(ci);
    }

    bool has_env = false, any_env_bad = false, any_ctrl_good = false;
    bool all_good = true, any_child = false;
    for (const auto& edge : res.nodes[idx].children) {
      any_child = true;
      const bool good = res.nodes[edge.node].label == Label::Good;
      all_good = all_good && good;
      if (edge.owner == Owner::Environment) {
        has_env = true;
        any_env_bad = any_env_bad || !good;
      } else {
        any_ctrl_good = any_ctrl_good || good;
      }
    }
    const bool final = quotient::is_final_node(res.nodes[idx].state);

    bool good;
    if (opt.universal) {
      good = all_good && (final || any_child);
    } else if (any_env_bad) {
      good = false;
    } else if (final) {
      good = true;
    } else {
      good = has_env || any_ctrl_good;
    }
    res.nodes[idx].label = good ? Label::Good : Label::Bad;
  };

  visit(0);
  res.controllable = res.nodes[0].label == Label::Good;
  res.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

// The executable strategy: per node all environment moves, plus the first
// good controller move where one is needed to avoid a non-final dead end.
// Stop nodes are final nodes with nothing selected.
struct Controller {
  struct Edge {
    quotient::SymbolicAction sym;
    Owner owner = Owner::Controller;
    std::size_t target = 0;
  };
  struct Node {
    quotient::QuotientState state;
    bool final = false;
    std::vector<Edge> selected;
  };
  std::vector<Node> nodes;  // index 0 is the initial node
};

inline Controller extract_controller(const ground::GroundTheory& theory,
                                     const SolveResult& res) {
  if (!res.controllable)
    throw std::logic_error("no controller exists for a bad root");

  // A pruned node folds back into its dominating ancestor.
  auto resolve = [&](int idx) {
    return res.nodes[idx].pruned ? res.nodes[idx].prune_to : idx;
  };

  Controller ctrl;
  std::vector<int> order;            // tree index per controller id
  std::vector<int> id_of(res.nodes.size(), -1);
  order.push_back(0);
  id_of[0] = 0;
  for (std::size_t at = 0; at < order.size(); ++at) {
    const GameNode& node = res.nodes[order[at]];
    Controller::Node out;
    out.state = node.state;
    out.final = quotient::is_final_node(node.state);

    bool has_env = false;
    for (const auto& edge : node.children)
      has_env = has_env || edge.owner == Owner::Environment;

    for (const auto& edge : node.children) {
      bool take = false;
      if (edge.owner == Owner::Environment) {
        take = true;
      } else if (!has_env && !out.final &&
                 res.nodes[edge.node].label == Label::Good) {
        bool already = false;
        for (const auto& sel : out.selected)
          already = already || sel.owner == Owner::Controller;
        take = !already;
      }
      if (!take) continue;
      int target = resolve(edge.node);
      if (res.nodes[target].label != Label::Good)
        throw std::logic_error("selected edge reaches a bad node");
      if (id_of[target] == -1) {
        id_of[target] = static_cast<int>(order.size());
        order.push_back(target);
      }
      Controller::Edge sel;
      sel.sym = edge.sym;
      sel.owner = edge.owner;
      sel.target = static_cast<std::size_t>(id_of[target]);
      out.selected.push_back(std::move(sel));
    }
    ctrl.nodes.push_back(std::move(out));
  }
  (void)theory;
  return ctrl;
}

// One randomized play of an extracted strategy on the concrete half-integer
// delay grid: at every node one admissible (selected edge, delay) pair is
// chosen uniformly, and a final node may stop instead. Records the prefix
// lengths at which the play sat in a final node — the points where it could
// have terminated and its trace faced the specification.
struct PlayTrace {
  std::vector<std::pair<Rational, ActionId>> trace;
  std::vector<std::size_t> stop_points;  // prefix lengths at final visits
  bool stopped = false;                  // ended by stopping at a final node
};

inline PlayTrace simulate_play(const ground::GroundTheory& theory,
                               const Controller& ctrl, std::mt19937_64& rng,
                               int max_steps = 64) {
  PlayTrace out;
  std::vector<Rational> grid;
  for (long long j = 0; j <= 2 * (theory.max_constant + 1); ++j)
    grid.emplace_back(j, 2);

  std::size_t at = 0;
  std::vector<Rational> nu(theory.clock_names.size(), Rational(0));
  Rational now(0);
  for (int step = 0; step < max_steps; ++step) {
    const Controller::Node& node = ctrl.nodes.at(at);
    if (node.final) {
      out.stop_points.push_back(out.trace.size());
      if (node.selected.empty()) {
        out.stopped = true;
        return out;
      }
    }
    struct Choice {
      std::size_t edge;
      Rational delay;
    };
    std::vector<Choice> choices;
    for (std::size_t e = 0; e < node.selected.size(); ++e) {
      for (const auto& d : grid) {
        std::vector<Rational> moved = nu;
        for (auto& v : moved) v = v + d;
        if (world::guard_sat(node.selected[e].sym.guard, moved))
          choices.push_back({e, d});
      }
    }
    if (choices.empty()) {
      if (node.final) {
        out.stopped = true;
        return out;
      }
      throw std::logic_error("strategy play reached a dead end");
    }
    // A final node stops with one extra slot among the choices.
    std::uniform_int_distribution<std::size_t> pick(
        0, choices.size() - (node.final ? 0 : 1));
    const std::size_t c = pick(rng);
    if (node.final && c == choices.size()) {
      out.stopped = true;
      return out;
    }
    const Controller::Edge& edge = node.selected[choices[c].edge];
    now = now + choices[c].delay;
    for (auto& v : nu) v = v + choices[c].delay;
    for (ClockId cl : edge.sym.resets) nu[cl] = Rational(0);
    out.trace.emplace_back(now, edge.sym.action);
    at = edge.target;
  }
  return out;
}

// Structural contract of an extracted strategy: selected edges exist and
// lead inside the graph, a node with an empty selection is final, and every
// environment move the quotient offers at a node is selected.
inline void validate_controller(const ground::GroundTheory& theory,
                                const ata::Ata& a, const Controller& ctrl) {
  if (ctrl.nodes.empty()) throw std::logic_error("controller has no nodes");
  for (const auto& node : ctrl.nodes) {
    auto offered = quotient::successors(node.state, theory, a);
    if (node.selected.empty() && !node.final)
      throw std::logic_error("non-final controller node has no moves");
    std::set<ActionId> selected_actions;
    for (const auto& sel : node.selected) {
      if (sel.target >= ctrl.nodes.size())
        throw std::logic_error("controller edge leaves the graph");
      bool offered_too = false;
      for (const auto& [sym, next] : offered)
        offered_too = offered_too || sym.action == sel.sym.action;
      if (!offered_too)
        throw std::logic_error("controller selects an unavailable action");
      selected_actions.insert(sel.sym.action);
    }
    for (const auto& [sym, next] : offered) {
      if (theory.actions.at(sym.action).owner != Owner::Environment) continue;
      if (!selected_actions.count(sym.action))
        throw std::logic_error("controller blocks an environment action");
    }
  }
}

}  // namespace tgs::game
