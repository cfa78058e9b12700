#pragma once

// Ground program expressions and their transition semantics: canonical form,
// finality, single-step transitions gated by action possibility, and the
// finite closure of reachable remainders.

#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/source_ast.hpp"
#include "tgs/world.hpp"

namespace tgs::prog {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable program AST over ground actions and ground test conditions.
// The empty program `nil` is Test(true). Star uses `left` as its body.
struct Node {
  enum class Kind { Act, Test, Seq, Choice, Conc, Star };
  Kind kind = Kind::Test;
  ActionId act = 0;
  ground::Expr test;
  NodePtr left, right;
};

inline NodePtr p_act(ActionId a) {
  Node n;
  n.kind = Node::Kind::Act;
  n.act = a;
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr p_test(ground::Expr e) {
  Node n;
  n.kind = Node::Kind::Test;
  n.test = std::move(e);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr p_nil() { return p_test(ground::e_true()); }

inline NodePtr p_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
  Node n;
  n.kind = kind;
  n.left = std::move(lhs);
  n.right = std::move(rhs);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr p_seq(NodePtr lhs, NodePtr rhs) {
  return p_binary(Node::Kind::Seq, std::move(lhs), std::move(rhs));
}
inline NodePtr p_choice(NodePtr lhs, NodePtr rhs) {
  return p_binary(Node::Kind::Choice, std::move(lhs), std::move(rhs));
}
inline NodePtr p_conc(NodePtr lhs, NodePtr rhs) {
  return p_binary(Node::Kind::Conc, std::move(lhs), std::move(rhs));
}

inline NodePtr p_star(NodePtr body) {
  Node n;
  n.kind = Node::Kind::Star;
  n.left = std::move(body);
  return std::make_shared<const Node>(std::move(n));
}

inline bool is_nil(const NodePtr& p) {
  return p->kind == Node::Kind::Test &&
         p->test.kind == ground::Expr::Kind::True;
}

// Structural total order; 0 means equal. After canonicalization this is the
// program-equality relation used by the search order and for map keys.
inline int compare(const NodePtr& a, const NodePtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case Node::Kind::Act:
      return a->act < b->act ? -1 : a->act > b->act ? 1 : 0;
    case Node::Kind::Test: return ground::compare(a->test, b->test);
    case Node::Kind::Star: return compare(a->left, b->left);
    default:
      if (int c = compare(a->left, b->left)) return c;
      return compare(a->right, b->right);
  }
}

inline bool equals(const NodePtr& a, const NodePtr& b) {
  return compare(a, b) == 0;
}

struct NodeLess {
  bool operator()(const NodePtr& a, const NodePtr& b) const {
    return compare(a, b) < 0;
  }
};

using ProgramSet = std::set<NodePtr, NodeLess>;

// Canonical form: nil is absorbed in Seq and Conc, structurally equal Choice
// branches collapse, and Star of the empty program is the empty program.
// Idempotent; preserves finality and the transition set.
inline NodePtr canonicalize(const NodePtr& p) {
  switch (p->kind) {
    case Node::Kind::Act:
    case Node::Kind::Test: return p;
    case Node::Kind::Seq:
    case Node::Kind::Conc: {
      NodePtr l = canonicalize(p->left);
      NodePtr r = canonicalize(p->right);
      if (is_nil(l)) return r;
      if (is_nil(r)) return l;
      if (l == p->left && r == p->right) return p;
      return p_binary(p->kind, std::move(l), std::move(r));
    }
    case Node::Kind::Choice: {
      NodePtr l = canonicalize(p->left);
      NodePtr r = canonicalize(p->right);
      if (equals(l, r)) return l;
      if (l == p->left && r == p->right) return p;
      return p_choice(std::move(l), std::move(r));
    }
    case Node::Kind::Star: {
      NodePtr b = canonicalize(p->left);
      if (is_nil(b)) return b;
      if (b == p->left) return p;
      return p_star(std::move(b));
    }
  }
  throw std::logic_error("unreachable");
}

// Whether the program may terminate in the given state: tests check their
// condition, sequences and concurrent compositions need both sides, choices
// need either side, iterations always may stop, actions never terminate.
inline bool is_final(const NodePtr& p, const world::FluentState& state) {
  switch (p->kind) {
    case Node::Kind::Act: return false;
    case Node::Kind::Test: return world::eval_static(state, p->test);
    case Node::Kind::Seq:
    case Node::Kind::Conc:
      return is_final(p->left, state) && is_final(p->right, state);
    case Node::Kind::Choice:
      return is_final(p->left, state) || is_final(p->right, state);
    case Node::Kind::Star: return true;
  }
  throw std::logic_error("unreachable");
}

using Step = std::pair<ActionId, NodePtr>;

struct StepLess {
  bool operator()(const Step& a, const Step& b) const {
    if (a.first != b.first) return a.first < b.first;
    return compare(a.second, b.second) < 0;
  }
};

using StepSet = std::set<Step, StepLess>;

namespace detail {

// State-independent over-approximation of finality: a test may hold in some
// state, so it counts as possibly final.
inline bool maybe_final(const NodePtr& p) {
  switch (p->kind) {
    case Node::Kind::Act: return false;
    case Node::Kind::Test: return true;
    case Node::Kind::Seq:
    case Node::Kind::Conc:
      return maybe_final(p->left) && maybe_final(p->right);
    case Node::Kind::Choice:
      return maybe_final(p->left) || maybe_final(p->right);
    case Node::Kind::Star: return true;
  }
  throw std::logic_error("unreachable");
}

// Shared transition core, parameterized over the finality predicate for the
// sequence rule and the action-possibility gate. Remainders are canonical.
inline StepSet transitions(const NodePtr& p,
                           const std::function<bool(const NodePtr&)>& fin,
                           const std::function<bool(ActionId)>& possible) {
  StepSet out;
  switch (p->kind) {
    case Node::Kind::Act:
      if (possible(p->act)) out.insert({p->act, p_nil()});
      return out;
    case Node::Kind::Test: return out;
    case Node::Kind::Seq: {
      for (const auto& [a, rem] : transitions(p->left, fin, possible))
        out.insert({a, canonicalize(p_seq(rem, p->right))});
      if (fin(p->left))
        for (const auto& s : transitions(p->right, fin, possible))
          out.insert(s);
      return out;
    }
    case Node::Kind::Choice: {
      for (const auto& s : transitions(p->left, fin, possible)) out.insert(s);
      for (const auto& s : transitions(p->right, fin, possible)) out.insert(s);
      return out;
    }
    case Node::Kind::Conc: {
      for (const auto& [a, rem] : transitions(p->left, fin, possible))
        out.insert({a, canonicalize(p_conc(rem, p->right))});
      for (const auto& [a, rem] : transitions(p->right, fin, possible))
        out.insert({a, canonicalize(p_conc(p->left, rem))});
      return out;
    }
    case Node::Kind::Star: {
      for (const auto& [a, rem] : transitions(p->left, fin, possible))
        out.insert({a, canonicalize(p_seq(rem, p))});
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// All single-step transitions (action, canonical remainder) available in the
// given state. Actions must be possible; clock feasibility is not checked
// here. The sequence rule steps into the right operand when the left is
// final in this state; iteration unfolds one round.
inline StepSet steps(const NodePtr& p, const world::FluentState& state,
                     const ground::GroundTheory& theory) {
  return detail::transitions(
      p, [&state](const NodePtr& q) { return is_final(q, state); },
      [&](ActionId a) { return world::poss(theory, state, a); });
}

// Finite superset of all remainders reachable from `root` in any state:
// the closure of the transition relation with the possibility gate removed
// and tests treated as possibly final. Includes the (canonicalized) root.
inline ProgramSet sub_programs(const NodePtr& root,
                               const ground::GroundTheory& /*theory*/,
                               std::size_t max_programs = 100000) {
  ProgramSet seen;
  std::vector<NodePtr> work;
  NodePtr start = canonicalize(root);
  seen.insert(start);
  work.push_back(std::move(start));
  auto fin = [](const NodePtr& q) { return detail::maybe_final(q); };
  auto any = [](ActionId) { return true; };
  while (!work.empty()) {
    NodePtr cur = std::move(work.back());
    work.pop_back();
    for (const auto& [a, rem] : detail::transitions(cur, fin, any)) {
      (void)a;
      if (seen.insert(rem).second) {
        if (seen.size() > max_programs)
          throw ResourceError("subprogram closure exceeds " +
                              std::to_string(max_programs) +
                              " programs; simplify the program");
        work.push_back(rem);
      }
    }
  }
  return seen;
}

// Structural equality of transition sets; both sides are ordered by the
// structural comparator, so a single pass suffices.
inline bool equals(const StepSet& a, const StepSet& b) {
  if (a.size() != b.size()) return false;
  auto it = b.begin();
  for (const auto& s : a) {
    if (s.first != it->first || !equals(s.second, it->second)) return false;
    ++it;
  }
  return true;
}

// Precedence: concurrency 1, choice 2, sequence 3, everything else 4; star
// bodies print at 5 so they are always parenthesized.
inline int precedence(const Node& p) {
  switch (p.kind) {
    case Node::Kind::Conc: return 1;
    case Node::Kind::Choice: return 2;
    case Node::Kind::Seq: return 3;
    default: return 4;
  }
}

// Renders the program in the source syntax; `nil` prints as the keyword.
inline std::string to_string(const NodePtr& p,
                             const ground::GroundTheory& theory,
                             int min_prec = 0) {
  if (is_nil(p)) return "nil";
  std::string out;
  switch (p->kind) {
    case Node::Kind::Act: out = theory.actions.at(p->act).name; break;
    case Node::Kind::Test:
      out = "?(" +
            ground::to_string(p->test, theory.atom_names, theory.actions) +
            ")";
      break;
    case Node::Kind::Seq:
    case Node::Kind::Choice:
    case Node::Kind::Conc: {
      const int self = precedence(*p);
      const char* sep = p->kind == Node::Kind::Conc     ? " || "
                        : p->kind == Node::Kind::Choice ? " | "
                                                        : "; ";
      out = to_string(p->left, theory, self) + sep +
            to_string(p->right, theory, self + 1);
      break;
    }
    case Node::Kind::Star: out = to_string(p->left, theory, 5) + "*"; break;
  }
  return precedence(*p) < min_prec ? "(" + std::move(out) + ")" : out;
}

// Converts a parsed program over the ground theory: action terms resolve to
// ground action ids, test conditions are grounded, and the result is
// canonical.
inline NodePtr ground_program(const ast::ProgramPtr& p,
                              const ground::GroundTheory& theory) {
  std::function<NodePtr(const ast::ProgramPtr&)> conv =
      [&](const ast::ProgramPtr& q) -> NodePtr {
    switch (q->kind) {
      case ast::PKind::Act: {
        ground::detail::Env env;
        return p_act(theory.action(
            ground::detail::canonical(q->act.name, q->act.args, env)));
      }
      case ast::PKind::Test:
        return p_test(ground::ground_static(q->test, theory));
      case ast::PKind::Seq:
      case ast::PKind::Choice:
      case ast::PKind::Conc: {
        NodePtr l = conv(q->children[0]);
        NodePtr r = conv(q->children[1]);
        Node::Kind k = q->kind == ast::PKind::Seq      ? Node::Kind::Seq
                       : q->kind == ast::PKind::Choice ? Node::Kind::Choice
                                                       : Node::Kind::Conc;
        return p_binary(k, std::move(l), std::move(r));
      }
      case ast::PKind::Star: return p_star(conv(q->children[0]));
    }
    throw std::logic_error("unreachable");
  };
  return canonicalize(conv(p));
}

}  // namespace tgs::prog
