#pragma once

// Independent brute-force solver over concrete configurations on a finite
// delay grid: explicit AND-OR search with adversarial timing, checking every
// reachable terminating prefix directly against the formula. A test
// instrument for validating the symbolic game, not a scalable solver.

#include <set>
#include <utility>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/mtl.hpp"
#include "tgs/program.hpp"
#include "tgs/rational.hpp"
#include "tgs/world.hpp"

namespace tgs::oracle {

enum class Verdict { Controllable, Uncontrollable, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Controllable: return "CONTROLLABLE";
    case Verdict::Uncontrollable: return "UNCONTROLLABLE";
    case Verdict::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

using Trace = std::vector<std::pair<Rational, ActionId>>;

struct Result {
  Verdict verdict = Verdict::Indeterminate;
  Trace witness;  // a violating timed trace, when one forced the verdict
};

struct Config {
  std::vector<Rational> grid;  // candidate delays before each action
  int depth = 8;               // maximum number of actions explored
};

// Half-integer delays through K+1: one representative per region, the exact
// integer points, and one value beyond the bound.
inline std::vector<Rational> default_grid(long long k) {
  std::vector<Rational> grid;
  for (long long j = 0; j <= 2 * (k + 1); ++j) grid.emplace_back(j, 2);
  return grid;
}

namespace detail {

struct Play {
  world::FluentState fluents;
  std::vector<Rational> nu;
  prog::NodePtr rho;
  Trace trace;
  Rational now{0};
};

struct Searcher {
  const ground::GroundTheory& theory;
  const mtl::FormulaPtr& spec;
  const Config& config;

  bool trace_is_bad(const Trace& trace) const {
    return mtl::check(mtl::fluent_trace(theory, trace), spec);
  }

  Verdict run(const Play& play, int depth, Trace& witness) const {
    const bool final = prog::is_final(play.rho, play.fluents);
    if (final && trace_is_bad(play.trace)) {
      witness = play.trace;
      return Verdict::Uncontrollable;
    }

    // A move is enabled when some grid delay satisfies its guard.
    struct Move {
      prog::Step step;
      bool env = false;
      std::vector<Rational> delays;
    };
    std::vector<Move> moves;
    bool any_env = false;
    for (const auto& step : prog::steps(play.rho, play.fluents, theory)) {
      Move m;
      m.step = step;
      m.env = theory.actions.at(step.first).owner == Owner::Environment;
      for (const auto& d : config.grid) {
        std::vector<Rational> moved = play.nu;
        for (auto& v : moved) v = v + d;
        if (world::guard_sat(world::guard(theory, step.first), moved))
          m.delays.push_back(d);
      }
      if (m.delays.empty()) continue;
      any_env = any_env || m.env;
      moves.push_back(std::move(m));
    }

    if (moves.empty()) return final ? Verdict::Controllable
                                    : Verdict::Uncontrollable;
    // With no environment move to keep selected, a final configuration may
    // simply stop: the empty selection wins outright.
    if (!any_env && final) return Verdict::Controllable;
    if (depth == 0) return Verdict::Indeterminate;

    auto outcome = [&](const Move& m, Trace& w) {
      // Adversarial timing: the move wins only if every delay does.
      bool indet = false;
      for (const auto& d : m.delays) {
        Play next;
        next.now = play.now + d;
        next.nu = play.nu;
        for (auto& v : next.nu) v = v + d;
        next.fluents =
            world::progress(theory, play.fluents, m.step.first);
        for (ClockId c : world::resets(theory, next.fluents, m.step.first))
          next.nu[c] = Rational(0);
        next.rho = m.step.second;
        next.trace = play.trace;
        next.trace.emplace_back(next.now, m.step.first);
        Verdict v = run(next, depth - 1, w);
        if (v == Verdict::Uncontrollable) return v;
        indet = indet || v == Verdict::Indeterminate;
      }
      return indet ? Verdict::Indeterminate : Verdict::Controllable;
    };

    // Every enabled environment move must win; the controller then needs a
    // winning move of its own only when there is no environment move and
    // the configuration cannot stop.
    bool env_indet = false;
    for (const auto& m : moves) {
      if (!m.env) continue;
      Trace w;
      Verdict v = outcome(m, w);
      if (v == Verdict::Uncontrollable) {
        witness = std::move(w);
        return v;
      }
      env_indet = env_indet || v == Verdict::Indeterminate;
    }
    if (any_env)
      return env_indet ? Verdict::Indeterminate : Verdict::Controllable;

    bool ctrl_indet = false;
    Trace first_loss;
    bool have_loss = false;
    for (const auto& m : moves) {
      Trace w;
      Verdict v = outcome(m, w);
      if (v == Verdict::Controllable) return v;
      if (v == Verdict::Indeterminate) ctrl_indet = true;
      if (v == Verdict::Uncontrollable && !have_loss) {
        have_loss = true;
        first_loss = std::move(w);
      }
    }
    if (ctrl_indet) return Verdict::Indeterminate;
    witness = std::move(first_loss);
    return Verdict::Uncontrollable;
  }
};

}  // namespace detail

inline Result brute_solve(const ground::GroundTheory& theory,
                          const prog::NodePtr& program,
                          const mtl::FormulaPtr& spec, Config config = {}) {
  if (config.grid.empty()) config.grid = default_grid(theory.max_constant);
  detail::Play start;
  start.fluents = world::initial_state(theory);
  start.nu.assign(theory.clock_names.size(), Rational(0));
  start.rho = prog::canonicalize(program);

  detail::Searcher searcher{theory, spec, config};
  Result res;
  res.verdict = searcher.run(start, config.depth, res.witness);
  if (res.verdict != Verdict::Uncontrollable) res.witness.clear();
  return res;
}

}  // namespace tgs::oracle
