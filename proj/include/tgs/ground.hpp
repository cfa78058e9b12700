#pragma once

// Grounds a parsed theory over its finite object domain: quantifiers expand
// substitutionally, rational constants in guards and the specification are
// scaled to integers, and the maximum constant K is computed.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/mtl.hpp"
#include "tgs/rational.hpp"
#include "tgs/source_ast.hpp"

namespace tgs::ground {

// Ground propositional condition in negation normal form. Action-equality
// leaves appear only in successor and reset conditions and are decided
// against the action being applied.
struct Expr {
  enum class Kind { True, False, Atom, NotAtom, ActIs, ActIsNot, And, Or };
  Kind kind = Kind::True;
  std::uint32_t id = 0;
  std::vector<Expr> children;
};

inline Expr e_true() { return Expr{Expr::Kind::True, 0, {}}; }
inline Expr e_false() { return Expr{Expr::Kind::False, 0, {}}; }
inline Expr e_atom(AtomId id) { return Expr{Expr::Kind::Atom, id, {}}; }
inline Expr e_not_atom(AtomId id) { return Expr{Expr::Kind::NotAtom, id, {}}; }
inline Expr e_act_is(ActionId id) { return Expr{Expr::Kind::ActIs, id, {}}; }
inline Expr e_act_is_not(ActionId id) {
  return Expr{Expr::Kind::ActIsNot, id, {}};
}

inline Expr e_and(std::vector<Expr> children) {
  std::vector<Expr> kept;
  for (auto& c : children) {
    if (c.kind == Expr::Kind::False) return e_false();
    if (c.kind != Expr::Kind::True) kept.push_back(std::move(c));
  }
  if (kept.empty()) return e_true();
  if (kept.size() == 1) return kept[0];
  return Expr{Expr::Kind::And, 0, std::move(kept)};
}

inline Expr e_or(std::vector<Expr> children) {
  std::vector<Expr> kept;
  for (auto& c : children) {
    if (c.kind == Expr::Kind::True) return e_true();
    if (c.kind != Expr::Kind::False) kept.push_back(std::move(c));
  }
  if (kept.empty()) return e_false();
  if (kept.size() == 1) return kept[0];
  return Expr{Expr::Kind::Or, 0, std::move(kept)};
}

inline Expr negate(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::True: return e_false();
    case Expr::Kind::False: return e_true();
    case Expr::Kind::Atom: return e_not_atom(e.id);
    case Expr::Kind::NotAtom: return e_atom(e.id);
    case Expr::Kind::ActIs: return e_act_is_not(e.id);
    case Expr::Kind::ActIsNot: return e_act_is(e.id);
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      std::vector<Expr> flipped;
      flipped.reserve(e.children.size());
      for (const auto& c : e.children) flipped.push_back(negate(c));
      return e.kind == Expr::Kind::And ? e_or(std::move(flipped))
                                       : e_and(std::move(flipped));
    }
  }
  throw std::logic_error("unreachable");
}

// Structural total order on conditions; 0 means equal. Used for canonical
// container keys and for deduplication.
inline int compare(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.id != b.id) return a.id < b.id ? -1 : 1;
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (int c = compare(a.children[i], b.children[i])) return c;
  return 0;
}

inline bool equals(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

struct GuardAtom {
  ClockId clock;
  CmpOp op;
  long long bound;  // scaled to an integer
};

// Conjunction; empty means unconstrained.
using GuardExpr = std::vector<GuardAtom>;

struct GroundAction {
  std::string name;
  Owner owner = Owner::Controller;
  Expr pre;
  GuardExpr guard;
};

// Renders a condition in the source syntax. Action-equality leaves print as
// `a == name` / `a != name` using the ground action's name.
inline std::string to_string(const Expr& e,
                             const std::vector<std::string>& atom_names,
                             const std::vector<GroundAction>& actions,
                             int parent_prec = 0) {
  auto wrap = [&](int prec, std::string s) {
    return prec < parent_prec ? "(" + std::move(s) + ")" : std::move(s);
  };
  switch (e.kind) {
    case Expr::Kind::True: return "true";
    case Expr::Kind::False: return "false";
    case Expr::Kind::Atom: return atom_names.at(e.id);
    case Expr::Kind::NotAtom: return "!" + atom_names.at(e.id);
    case Expr::Kind::ActIs: return wrap(2, "a == " + actions.at(e.id).name);
    case Expr::Kind::ActIsNot:
      return wrap(2, "a != " + actions.at(e.id).name);
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const bool conj = e.kind == Expr::Kind::And;
      const int prec = conj ? 2 : 1;
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += conj ? " & " : " | ";
        out += to_string(e.children[i], atom_names, actions, prec + 1);
      }
      return wrap(prec, std::move(out));
    }
  }
  throw std::logic_error("unreachable");
}

struct GroundTheory {
  std::vector<std::string> atom_names;
  std::map<std::string, AtomId> atom_ids;
  std::vector<std::string> clock_names;
  std::map<std::string, ClockId> clock_ids;
  std::vector<GroundAction> actions;
  std::map<std::string, ActionId> action_ids;
  std::vector<Expr> successor;  // indexed by atom
  std::vector<Expr> reset;      // indexed by clock
  std::vector<bool> init;       // indexed by atom
  std::map<std::string, std::vector<std::string>> domain;  // type -> objects
  Rational scale{1};
  long long max_constant = 0;  // K: over scaled guards and the scaled spec

  AtomId atom(const std::string& name) const {
    auto it = atom_ids.find(name);
    if (it == atom_ids.end())
      throw std::invalid_argument("unknown atom '" + name + "'");
    return it->second;
  }

  ActionId action(const std::string& name) const {
    auto it = action_ids.find(name);
    if (it == action_ids.end())
      throw std::invalid_argument("unknown action '" + name + "'");
    return it->second;
  }
};

namespace detail {

using Env = std::map<std::string, std::string>;  // variable -> object

inline std::string resolve(const ast::Term& t, const Env& env) {
  if (!t.is_var) return t.name;
  auto it = env.find(t.name);
  if (it == env.end())
    throw std::logic_error("unbound variable '" + t.name + "'");
  return it->second;
}

inline std::string canonical(const std::string& head,
                             const std::vector<ast::Term>& args,
                             const Env& env) {
  if (args.empty()) return head;
  std::string out = head + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += resolve(args[i], env);
  }
  return out + ")";
}

// Cartesian product over the object domains of the given types, in
// declaration order. An empty type yields no bindings.
inline void for_each_binding(
    const std::map<std::string, std::vector<std::string>>& domain,
    const std::vector<std::string>& types, Env& env,
    const std::vector<std::string>& vars, std::size_t i,
    const std::function<void()>& body) {
  if (i == types.size()) {
    body();
    return;
  }
  auto it = domain.find(types[i]);
  if (it == domain.end()) return;
  for (const auto& obj : it->second) {
    env[vars[i]] = obj;
    for_each_binding(domain, types, env, vars, i + 1, body);
  }
  env.erase(vars[i]);
}

// Expands quantifiers substitutionally over the object domain and resolves
// atoms and action terms to their ids, producing negation normal form.
inline Expr ground_formula(
    const ast::FormulaPtr& f, Env& env,
    const std::map<std::string, std::vector<std::string>>& domain,
    const std::map<std::string, AtomId>& atom_ids,
    const std::map<std::string, ActionId>& action_ids) {
  switch (f->kind) {
    case ast::FKind::True: return e_true();
    case ast::FKind::False: return e_false();
    case ast::FKind::Atom:
      return e_atom(atom_ids.at(canonical(f->pred, f->args, env)));
    case ast::FKind::ActEq: {
      std::string name = canonical(f->act.name, f->act.args, env);
      ActionId id = action_ids.at(name);
      return f->neq ? e_act_is_not(id) : e_act_is(id);
    }
    case ast::FKind::Not:
      return negate(
          ground_formula(f->children[0], env, domain, atom_ids, action_ids));
    case ast::FKind::And:
    case ast::FKind::Or: {
      std::vector<Expr> parts;
      for (const auto& c : f->children)
        parts.push_back(ground_formula(c, env, domain, atom_ids, action_ids));
      return f->kind == ast::FKind::And ? e_and(std::move(parts))
                                        : e_or(std::move(parts));
    }
    case ast::FKind::Exists:
    case ast::FKind::Forall: {
      std::vector<std::string> types, vars;
      for (const auto& b : f->binders) {
        types.push_back(b.type);
        vars.push_back(b.var);
      }
      std::vector<Expr> parts;
      for_each_binding(domain, types, env, vars, 0, [&] {
        parts.push_back(
            ground_formula(f->children[0], env, domain, atom_ids, action_ids));
      });
      return f->kind == ast::FKind::Exists ? e_or(std::move(parts))
                                           : e_and(std::move(parts));
    }
  }
  throw std::logic_error("unreachable");
}

class Grounder {
 public:
  Grounder(const ast::SourceSpec& spec, std::size_t max_atoms)
      : spec_(spec), max_atoms_(max_atoms) {
    for (const auto& o : spec.objects)
      theory_.domain[o.type].push_back(o.name);
  }

  std::pair<GroundTheory, mtl::FormulaPtr> run() {
    enumerate_atoms();
    for (const auto& c : spec_.clocks) {
      theory_.clock_ids[c] = static_cast<ClockId>(theory_.clock_names.size());
      theory_.clock_names.push_back(c);
    }
    compute_scale();
    enumerate_actions();
    ground_actions();
    ground_successors();
    ground_resets();
    ground_init();
    mtl::AtomTable table;
    table.names = theory_.atom_names;
    table.ids = theory_.atom_ids;
    mtl::FormulaPtr spec_bad =
        mtl::compile(spec_.spec_bad, table, /*extend=*/false, theory_.scale);
    collect_spec_constants(spec_bad);
    return {std::move(theory_), std::move(spec_bad)};
  }

 private:
  void for_each_binding(const std::vector<std::string>& types, Env& env,
                        const std::vector<std::string>& vars, std::size_t i,
                        const std::function<void()>& body) {
    detail::for_each_binding(theory_.domain, types, env, vars, i, body);
  }

  void enumerate_atoms() {
    for (const auto& f : spec_.fluents) {
      std::vector<std::string> vars;
      for (std::size_t i = 0; i < f.arg_types.size(); ++i)
        vars.push_back("$" + std::to_string(i));
      Env env;
      for_each_binding(f.arg_types, env, vars, 0, [&] {
        std::vector<ast::Term> args;
        for (const auto& v : vars) args.push_back(ast::Term{true, v});
        std::string name = canonical(f.name, args, env);
        if (theory_.atom_names.size() >= max_atoms_)
          throw ResourceError("ground atom universe exceeds " +
                              std::to_string(max_atoms_) +
                              " atoms; raise --max-atoms or shrink the domain");
        theory_.atom_ids[name] =
            static_cast<AtomId>(theory_.atom_names.size());
        theory_.atom_names.push_back(name);
      });
    }
  }

  void enumerate_actions() {
    for (const auto& a : spec_.actions) {
      std::vector<std::string> types, vars;
      for (const auto& p : a.params) {
        types.push_back(p.type);
        vars.push_back(p.var);
      }
      Env env;
      for_each_binding(types, env, vars, 0, [&] {
        std::vector<ast::Term> args;
        for (const auto& v : vars) args.push_back(ast::Term{true, v});
        GroundAction ga;
        ga.name = canonical(a.name, args, env);
        ga.owner = a.owner;
        theory_.action_ids[ga.name] =
            static_cast<ActionId>(theory_.actions.size());
        theory_.actions.push_back(std::move(ga));
      });
    }
  }

  void compute_scale() {
    long long lcd = 1;
    auto fold = [&lcd](const Rational& r) {
      lcd = std::lcm(lcd, r.denominator());
    };
    for (const auto& a : spec_.actions)
      for (const auto& g : a.guard) fold(g.bound);
    fold_mtl_denominators(spec_.spec_bad, fold);
    theory_.scale = Rational(lcd);
  }

  template <typename F>
  void fold_mtl_denominators(const ast::MtlPtr& m, F&& fold) {
    if (m->kind == ast::MKind::Until) {
      fold(m->ivl.lo);
      if (!m->ivl.hi_inf) fold(m->ivl.hi);
    }
    for (const auto& c : m->children) fold_mtl_denominators(c, fold);
  }

  long long to_scaled_int(const Rational& r) {
    Rational scaled = r * theory_.scale;
    if (scaled.denominator() != 1)
      throw std::logic_error("scale does not clear denominator");
    return scaled.numerator();
  }

  void ground_actions() {
    std::size_t next = 0;
    for (const auto& a : spec_.actions) {
      std::vector<std::string> types, vars;
      for (const auto& p : a.params) {
        types.push_back(p.type);
        vars.push_back(p.var);
      }
      Env env;
      for_each_binding(types, env, vars, 0, [&] {
        GroundAction& ga = theory_.actions[next++];
        ga.pre = ground_formula(a.pre, env);
        for (const auto& atom : a.guard) {
          GuardAtom g;
          g.clock = theory_.clock_ids.at(atom.clock);
          g.op = atom.op;
          g.bound = to_scaled_int(atom.bound);
          theory_.max_constant = std::max(theory_.max_constant, g.bound);
          ga.guard.push_back(g);
        }
      });
    }
  }

  void ground_successors() {
    std::map<std::string, const ast::SsaDecl*> by_fluent;
    for (const auto& s : spec_.ssas) by_fluent[s.fluent] = &s;
    for (const auto& f : spec_.fluents) {
      const ast::SsaDecl* ssa = by_fluent.at(f.name);
      std::vector<std::string> types, vars;
      for (const auto& p : ssa->params) {
        types.push_back(p.type);
        vars.push_back(p.var);
      }
      Env env;
      for_each_binding(types, env, vars, 0, [&] {
        theory_.successor.push_back(ground_formula(ssa->rhs, env));
      });
    }
    if (theory_.successor.size() != theory_.atom_names.size())
      throw std::logic_error("successor table size mismatch");
  }

  void ground_resets() {
    std::map<std::string, const ast::ResetDecl*> by_clock;
    for (const auto& r : spec_.resets) by_clock[r.clock] = &r;
    for (const auto& c : spec_.clocks) {
      Env env;
      theory_.reset.push_back(ground_formula(by_clock.at(c)->rhs, env));
    }
  }

  void ground_init() {
    theory_.init.assign(theory_.atom_names.size(), false);
    for (const auto& atom : spec_.init) {
      std::vector<ast::Term> args;
      for (const auto& a : atom.args) args.push_back(ast::Term{false, a});
      Env env;
      theory_.init[theory_.atom_ids.at(canonical(atom.pred, args, env))] =
          true;
    }
  }

  void collect_spec_constants(const mtl::FormulaPtr& f) {
    if (f->kind == mtl::Kind::Until) {
      auto fold = [this](const Rational& r) {
        if (r.denominator() != 1)
          throw std::logic_error("scaled spec constant not integral");
        theory_.max_constant = std::max(theory_.max_constant, r.numerator());
      };
      fold(f->ivl.lo);
      if (!f->ivl.hi_inf) fold(f->ivl.hi);
    }
    for (const auto& c : f->children) collect_spec_constants(c);
  }

  Expr ground_formula(const ast::FormulaPtr& f, Env& env) {
    return detail::ground_formula(f, env, theory_.domain, theory_.atom_ids,
                                  theory_.action_ids);
  }

  const ast::SourceSpec& spec_;
  std::size_t max_atoms_;
  GroundTheory theory_;
};

}  // namespace detail

// Grounds the theory and returns it with the scaled specification formula.
inline std::pair<GroundTheory, mtl::FormulaPtr> ground_theory(
    const ast::SourceSpec& spec, std::size_t max_atoms = 10000) {
  return detail::Grounder(spec, max_atoms).run();
}

// Grounds a single closed formula against an already-ground theory. Used for
// the test conditions inside programs.
inline Expr ground_static(const ast::FormulaPtr& f, const GroundTheory& th) {
  detail::Env env;
  return detail::ground_formula(f, env, th.domain, th.atom_ids, th.action_ids);
}

}  // namespace tgs::ground
