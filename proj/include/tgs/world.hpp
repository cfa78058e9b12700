#pragma once

// The unique world induced by a complete initial state: static evaluation,
// action possibility, fluent progression, clock resets and guards.

#include <set>
#include <stdexcept>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/rational.hpp"

namespace tgs::world {

using FluentState = std::vector<bool>;  // indexed by AtomId

inline constexpr ActionId no_action = static_cast<ActionId>(-1);

// The set of atoms holding in a state, the form consumed by the automaton.
inline std::set<AtomId> atom_set(const FluentState& state) {
  std::set<AtomId> out;
  for (std::size_t f = 0; f < state.size(); ++f)
    if (state[f]) out.insert(static_cast<AtomId>(f));
  return out;
}

inline FluentState initial_state(const ground::GroundTheory& theory) {
  return FluentState(theory.init.begin(), theory.init.end());
}

// Evaluates a ground condition. Action-equality leaves require the action
// being applied; static contexts (preconditions, tests) pass no action.
inline bool eval_static(const FluentState& state, const ground::Expr& e,
                        ActionId action = no_action) {
  using K = ground::Expr::Kind;
  switch (e.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return state[e.id];
    case K::NotAtom: return !state[e.id];
    case K::ActIs:
      if (action == no_action)
        throw std::logic_error("action equality outside action context");
      return e.id == action;
    case K::ActIsNot:
      if (action == no_action)
        throw std::logic_error("action equality outside action context");
      return e.id != action;
    case K::And:
      for (const auto& c : e.children)
        if (!eval_static(state, c, action)) return false;
      return true;
    case K::Or:
      for (const auto& c : e.children)
        if (eval_static(state, c, action)) return true;
      return false;
  }
  throw std::logic_error("unreachable");
}

inline bool poss(const ground::GroundTheory& theory, const FluentState& state,
                 ActionId action) {
  return eval_static(state, theory.actions.at(action).pre);
}

// All successor conditions read the pre-state; the update is simultaneous.
inline FluentState progress(const ground::GroundTheory& theory,
                            const FluentState& state, ActionId action) {
  FluentState next(state.size());
  for (std::size_t f = 0; f < state.size(); ++f)
    next[f] = eval_static(state, theory.successor[f], action);
  return next;
}

// Reset conditions are evaluated on the post-action state.
inline std::set<ClockId> resets(const ground::GroundTheory& theory,
                                const FluentState& post_state,
                                ActionId action) {
  std::set<ClockId> out;
  for (std::size_t c = 0; c < theory.reset.size(); ++c)
    if (eval_static(post_state, theory.reset[c], action))
      out.insert(static_cast<ClockId>(c));
  return out;
}

inline const ground::GuardExpr& guard(const ground::GroundTheory& theory,
                                      ActionId action) {
  return theory.actions.at(action).guard;
}

// Concrete guard satisfaction over a clock valuation in scaled units.
inline bool guard_sat(const ground::GuardExpr& g,
                      const std::vector<Rational>& valuation) {
  for (const auto& atom : g)
    if (!cmp_holds(valuation.at(atom.clock), atom.op,
                   Rational(atom.bound)))
      return false;
  return true;
}

}  // namespace tgs::world

namespace tgs::mtl {

// The timed word induced by running a timed ground-action sequence from the
// initial state: position 0 is the initial fluents at time 0, position i
// the fluents after the first i actions.
inline TimedWord fluent_trace(
    const ground::GroundTheory& theory,
    const std::vector<std::pair<Rational, ActionId>>& actions) {
  TimedWord word;
  world::FluentState state = world::initial_state(theory);
  auto letter = [&](const world::FluentState& s, const Rational& t) {
    TimedLetter l;
    l.time = t;
    l.atoms = world::atom_set(s);
    return l;
  };
  word.push_back(letter(state, Rational(0)));
  Rational prev(0);
  for (const auto& [t, a] : actions) {
    if (t < prev)
      throw std::invalid_argument("action timestamps must be nondecreasing");
    prev = t;
    state = world::progress(theory, state, a);
    word.push_back(letter(state, t));
  }
  return word;
}

}  // namespace tgs::mtl
