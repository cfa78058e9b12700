#pragma once

// The deterministic regionalized quotient: nodes keyed by fluent state,
// remaining program, and a pooled set of region words. Successor nodes
// absorb all timing nondeterminism — the symbolic alphabet carries the
// action, its guard, and its reset set, but no delay.

#include <set>
#include <utility>
#include <vector>

#include "tgs/ata.hpp"
#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/program.hpp"
#include "tgs/region.hpp"
#include "tgs/world.hpp"

namespace tgs::quotient {

// One symbolic transition: guard and resets are derived from the theory,
// never free.
struct SymbolicAction {
  ActionId action = 0;
  ground::GuardExpr guard;
  std::set<ClockId> resets;
};

struct QuotientState {
  world::FluentState fluents;
  prog::NodePtr rho;
  std::set<region::CanonicalWord> words;
  // True when every automaton run has died: the bad-behavior formula can no
  // longer be satisfied along this branch, so the node is never bad; the
  // words then keep only the clock skeleton needed for future guards.
  bool spec_dead = false;
  // One representative symbolic trace for diagnostics and controller
  // output; never part of the node's identity.
  std::vector<SymbolicAction> witness;
};

// Identity for search purposes: (fluents, program, word-set, dead flag).
inline int compare(const QuotientState& a, const QuotientState& b) {
  if (a.fluents != b.fluents) return a.fluents < b.fluents ? -1 : 1;
  if (int c = prog::compare(a.rho, b.rho); c != 0) return c;
  if (a.spec_dead != b.spec_dead) return a.spec_dead ? -1 : 1;
  if (a.words != b.words) return a.words < b.words ? -1 : 1;
  return 0;
}

inline bool equals(const QuotientState& a, const QuotientState& b) {
  return compare(a, b) == 0;
}

struct StateLess {
  bool operator()(const QuotientState& a, const QuotientState& b) const {
    return compare(a, b) < 0;
  }
};

// The root: initial fluents, the canonicalized program, and the words
// obtained by consuming the initial fluent symbol at time zero. If the
// automaton dies immediately the specification is unsatisfiable outright.
inline QuotientState initial_node(const ground::GroundTheory& theory,
                                  const prog::NodePtr& program,
                                  const ata::Ata& a) {
  QuotientState q;
  q.fluents = world::initial_state(theory);
  q.rho = prog::canonicalize(program);
  const long long k = theory.max_constant;
  std::vector<Rational> zeros(theory.clock_names.size(), Rational(0));
  auto models = ata::minimal_models(
      ata::initial_delta(a, world::atom_set(q.fluents)), Rational(0));
  for (const auto& g : models)
    q.words.insert(region::canonical_word(zeros, g, k));
  if (q.words.empty()) {
    q.spec_dead = true;
    q.words.insert(region::canonical_word(zeros, {}, k));
  }
  return q;
}

// One successor per program step (action, remainder): the new fluent state
// is fed to the automaton as the edge symbol, and the word-set pools every
// guard-satisfying elapse of every current word. An action whose guard no
// timing can meet yields no successor; an action under which every
// automaton run dies yields a spec-dead node keeping the clock skeletons.
inline std::vector<std::pair<SymbolicAction, QuotientState>> successors(
    const QuotientState& node, const ground::GroundTheory& theory,
    const ata::Ata& a) {
  std::vector<std::pair<SymbolicAction, QuotientState>> out;
  for (const auto& [act, rem] : prog::steps(node.rho, node.fluents, theory)) {
    world::FluentState post = world::progress(theory, node.fluents, act);
    SymbolicAction sym;
    sym.action = act;
    sym.guard = world::guard(theory, act);
    sym.resets = world::resets(theory, post, act);
    const auto symbol = world::atom_set(post);

    std::set<region::CanonicalWord> pooled, skeletons;
    bool feasible = false;
    for (const auto& h : node.words)
      for (const auto& ht : region::time_successors(h)) {
        if (!region::guard_holds(ht, sym.guard)) continue;
        feasible = true;
        auto stepped = region::word_edge_step(ht, sym.resets, symbol, a);
        if (stepped.empty()) {
          auto skel = region::word_edge_step(region::strip_locations(ht),
                                             sym.resets, symbol, a);
          skeletons.insert(skel.begin(), skel.end());
        } else {
          pooled.insert(stepped.begin(), stepped.end());
        }
      }
    if (!feasible) continue;

    QuotientState next;
    next.fluents = std::move(post);
    next.rho = rem;
    next.spec_dead = node.spec_dead || pooled.empty();
    next.words = pooled.empty() ? std::move(skeletons) : std::move(pooled);
    next.witness = node.witness;
    next.witness.push_back(sym);
    out.emplace_back(std::move(sym), std::move(next));
  }
  return out;
}

inline bool is_final_node(const QuotientState& node) {
  return prog::is_final(node.rho, node.fluents);
}

// A node is bad when the program may terminate here while some pooled word
// is accepting — every automaton entry in an accepting location, with the
// empty configuration (bad behavior fully matched) accepting vacuously.
inline bool is_bad(const QuotientState& node, const ata::Ata& a) {
  if (node.spec_dead || !is_final_node(node)) return false;
  for (const auto& w : node.words)
    if (region::all_locations_accepting(w, a)) return true;
  return false;
}

}  // namespace tgs::quotient
