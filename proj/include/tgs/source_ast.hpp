#pragma once

// Surface syntax trees produced by the parser, before grounding. Formulas
// still contain typed variables and quantifiers; action and fluent references
// are by name.

#include <memory>
#include <string>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/rational.hpp"

namespace tgs::ast {

struct Term {
  bool is_var = false;
  std::string name;

  friend bool operator==(const Term& a, const Term& b) {
    return a.is_var == b.is_var && a.name == b.name;
  }
};

struct ActionTerm {
  std::string name;
  std::vector<Term> args;

  friend bool operator==(const ActionTerm& a, const ActionTerm& b) {
    return a.name == b.name && a.args == b.args;
  }
};

struct Binder {
  std::string var;
  std::string type;

  friend bool operator==(const Binder& a, const Binder& b) {
    return a.var == b.var && a.type == b.type;
  }
};

// Static (state) formulas: fluent atoms, action equalities against the
// distinguished action variable `a`, boolean connectives, typed quantifiers.
enum class FKind { True, False, Atom, ActEq, Not, And, Or, Exists, Forall };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind;
  std::string pred;                 // Atom
  std::vector<Term> args;           // Atom
  ActionTerm act;                   // ActEq
  bool neq = false;                 // ActEq: true for a != t
  std::vector<FormulaPtr> children; // Not (1), And/Or (n), quantifier body (1)
  std::vector<Binder> binders;      // Exists/Forall
};

inline FormulaPtr f_true() {
  static FormulaPtr t = std::make_shared<Formula>(Formula{FKind::True});
  return t;
}
inline FormulaPtr f_false() {
  static FormulaPtr f = std::make_shared<Formula>(Formula{FKind::False});
  return f;
}
inline FormulaPtr f_atom(std::string pred, std::vector<Term> args) {
  Formula f{FKind::Atom};
  f.pred = std::move(pred);
  f.args = std::move(args);
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_acteq(ActionTerm act, bool neq) {
  Formula f{FKind::ActEq};
  f.act = std::move(act);
  f.neq = neq;
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_not(FormulaPtr inner) {
  Formula f{FKind::Not};
  f.children = {std::move(inner)};
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_nary(FKind kind, std::vector<FormulaPtr> children) {
  if (children.size() == 1) return children[0];
  Formula f{kind};
  f.children = std::move(children);
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_quant(FKind kind, std::vector<Binder> binders,
                          FormulaPtr body) {
  Formula f{kind};
  f.binders = std::move(binders);
  f.children = {std::move(body)};
  return std::make_shared<Formula>(std::move(f));
}

inline bool equals(const FormulaPtr& a, const FormulaPtr& b);

inline bool equals(const std::vector<FormulaPtr>& a,
                   const std::vector<FormulaPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equals(a[i], b[i])) return false;
  return true;
}

inline bool equals(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::True:
    case FKind::False: return true;
    case FKind::Atom: return a->pred == b->pred && a->args == b->args;
    case FKind::ActEq: return a->act == b->act && a->neq == b->neq;
    case FKind::Not:
    case FKind::And:
    case FKind::Or: return equals(a->children, b->children);
    case FKind::Exists:
    case FKind::Forall:
      return a->binders == b->binders && equals(a->children, b->children);
  }
  return false;
}

// Programs: action invocations, tests, sequence, choice, interleaving, star.
// nil is Test(true).
enum class PKind { Act, Test, Seq, Choice, Conc, Star };

struct Program;
using ProgramPtr = std::shared_ptr<const Program>;

struct Program {
  PKind kind;
  ActionTerm act;                   // Act
  FormulaPtr test;                  // Test
  std::vector<ProgramPtr> children; // Seq/Choice/Conc (2), Star (1)
};

inline ProgramPtr p_act(ActionTerm act) {
  Program p{PKind::Act};
  p.act = std::move(act);
  return std::make_shared<Program>(std::move(p));
}
inline ProgramPtr p_test(FormulaPtr test) {
  Program p{PKind::Test};
  p.test = std::move(test);
  return std::make_shared<Program>(std::move(p));
}
inline ProgramPtr p_nil() {
  static ProgramPtr nil = p_test(f_true());
  return nil;
}
inline ProgramPtr p_binary(PKind kind, ProgramPtr lhs, ProgramPtr rhs) {
  Program p{kind};
  p.children = {std::move(lhs), std::move(rhs)};
  return std::make_shared<Program>(std::move(p));
}
inline ProgramPtr p_star(ProgramPtr body) {
  Program p{PKind::Star};
  p.children = {std::move(body)};
  return std::make_shared<Program>(std::move(p));
}

inline bool is_nil(const ProgramPtr& p) {
  return p->kind == PKind::Test && p->test->kind == FKind::True;
}

inline bool equals(const ProgramPtr& a, const ProgramPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case PKind::Act: return a->act == b->act;
    case PKind::Test: return equals(a->test, b->test);
    default:
      if (a->children.size() != b->children.size()) return false;
      for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!equals(a->children[i], b->children[i])) return false;
      return true;
  }
}

// Metric-time intervals over the nonnegative rationals.
struct Interval {
  Rational lo{0};
  bool lo_strict = false;
  bool hi_inf = true;
  Rational hi{0};
  bool hi_strict = false;

  bool contains(const Rational& v) const {
    if (lo_strict ? v <= lo : v < lo) return false;
    if (hi_inf) return true;
    return hi_strict ? v < hi : v <= hi;
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.lo != b.lo || a.lo_strict != b.lo_strict || a.hi_inf != b.hi_inf)
      return false;
    return a.hi_inf || (a.hi == b.hi && a.hi_strict == b.hi_strict);
  }
};

inline Interval interval_upto(const Rational& hi) {
  return Interval{Rational(0), false, false, hi, false};
}

inline std::string to_string(const Interval& ivl) {
  std::string s;
  s += ivl.lo_strict ? '(' : '[';
  s += tgs::to_string(ivl.lo);
  s += ',';
  if (ivl.hi_inf) {
    s += "inf)";
  } else {
    s += tgs::to_string(ivl.hi);
    s += ivl.hi_strict ? ')' : ']';
  }
  return s;
}

// Metric-temporal formulas over ground fluent atoms. F and G are expanded
// by the parser, so only these node kinds exist.
enum class MKind { True, False, Atom, Not, And, Or, Until };

struct Mtl;
using MtlPtr = std::shared_ptr<const Mtl>;

struct Mtl {
  MKind kind;
  std::string pred;            // Atom
  std::vector<Term> args;      // Atom (constants only)
  std::vector<MtlPtr> children;
  Interval ivl;                // Until
};

inline MtlPtr m_true() {
  static MtlPtr t = std::make_shared<Mtl>(Mtl{MKind::True});
  return t;
}
inline MtlPtr m_false() {
  static MtlPtr f = std::make_shared<Mtl>(Mtl{MKind::False});
  return f;
}
inline MtlPtr m_atom(std::string pred, std::vector<Term> args) {
  Mtl m{MKind::Atom};
  m.pred = std::move(pred);
  m.args = std::move(args);
  return std::make_shared<Mtl>(std::move(m));
}
inline MtlPtr m_not(MtlPtr inner) {
  Mtl m{MKind::Not};
  m.children = {std::move(inner)};
  return std::make_shared<Mtl>(std::move(m));
}
inline MtlPtr m_binary(MKind kind, MtlPtr lhs, MtlPtr rhs) {
  Mtl m{kind};
  m.children = {std::move(lhs), std::move(rhs)};
  return std::make_shared<Mtl>(std::move(m));
}
inline MtlPtr m_until(Interval ivl, MtlPtr lhs, MtlPtr rhs) {
  Mtl m{MKind::Until};
  m.ivl = ivl;
  m.children = {std::move(lhs), std::move(rhs)};
  return std::make_shared<Mtl>(std::move(m));
}
// F[I] p  =  true U[I] p
inline MtlPtr m_finally(Interval ivl, MtlPtr body) {
  return m_until(ivl, m_true(), std::move(body));
}
// G[I] p  =  !(true U[I] !p)
inline MtlPtr m_globally(Interval ivl, MtlPtr body) {
  return m_not(m_until(ivl, m_true(), m_not(std::move(body))));
}

inline bool equals(const MtlPtr& a, const MtlPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case MKind::True:
    case MKind::False: return true;
    case MKind::Atom: return a->pred == b->pred && a->args == b->args;
    case MKind::Until:
      if (!(a->ivl == b->ivl)) return false;
      [[fallthrough]];
    default:
      if (a->children.size() != b->children.size()) return false;
      for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!equals(a->children[i], b->children[i])) return false;
      return true;
  }
}

// One conjunct of a guard: clock `op` constant.
struct ClockAtom {
  std::string clock;
  CmpOp op;
  Rational bound;

  friend bool operator==(const ClockAtom& a, const ClockAtom& b) {
    return a.clock == b.clock && a.op == b.op && a.bound == b.bound;
  }
};

// Guards are conjunctions of clock atoms; the empty conjunction is true.
using Guard = std::vector<ClockAtom>;

struct ObjectDecl {
  std::string name;
  std::string type;
};

struct FluentDecl {
  std::string name;
  std::vector<std::string> arg_types;
};

struct ActionDecl {
  std::string name;
  std::vector<Binder> params;
  Owner owner = Owner::Controller;
  FormulaPtr pre;
  Guard guard;
  SourceLoc loc;
};

struct SsaDecl {
  std::string fluent;
  std::vector<Binder> params;
  FormulaPtr rhs;
  SourceLoc loc;
};

struct ResetDecl {
  std::string clock;
  FormulaPtr rhs;
  SourceLoc loc;
};

struct InitAtom {
  std::string pred;
  std::vector<std::string> args;
};

struct SourceSpec {
  std::string filename;
  std::vector<ObjectDecl> objects;
  std::vector<FluentDecl> fluents;
  std::vector<std::string> clocks;
  std::vector<ActionDecl> actions;
  std::vector<SsaDecl> ssas;
  std::vector<ResetDecl> resets;
  std::vector<InitAtom> init;
  ProgramPtr program;
  MtlPtr spec_bad;
  bool spec_was_desired = false;  // written as spec_good and negated
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Printers. print_spec o parse is the identity on parser output (tested).

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const ActionTerm& a) {
  if (a.args.empty()) return a.name;
  std::string s = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += a.args[i].name;
  }
  return s + ")";
}

namespace detail {

// Precedence levels for static formulas: atom 4, not 3, and 2, or 1,
// quantifier 0.
inline int prec(const Formula& f) {
  switch (f.kind) {
    case FKind::Exists:
    case FKind::Forall: return 0;
    case FKind::Or: return 1;
    case FKind::And: return 2;
    case FKind::Not: return 3;
    default: return 4;
  }
}

inline void print(const FormulaPtr& f, int min_prec, std::string& out) {
  bool paren = prec(*f) < min_prec;
  if (paren) out += '(';
  switch (f->kind) {
    case FKind::True: out += "true"; break;
    case FKind::False: out += "false"; break;
    case FKind::Atom: {
      out += f->pred;
      if (!f->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ", ";
          out += f->args[i].name;
        }
        out += ')';
      }
      break;
    }
    case FKind::ActEq:
      out += "a ";
      out += f->neq ? "!=" : "==";
      out += ' ';
      out += to_string(f->act);
      break;
    case FKind::Not:
      out += '!';
      print(f->children[0], 4, out);
      break;
    case FKind::And:
    case FKind::Or: {
      int self = prec(*f);
      const char* sep = f->kind == FKind::And ? " & " : " | ";
      for (std::size_t i = 0; i < f->children.size(); ++i) {
        if (i) out += sep;
        print(f->children[i], i == 0 ? self : self + 1, out);
      }
      break;
    }
    case FKind::Exists:
    case FKind::Forall: {
      out += f->kind == FKind::Exists ? "exists " : "forall ";
      for (std::size_t i = 0; i < f->binders.size(); ++i) {
        if (i) out += ", ";
        out += f->binders[i].var + ": " + f->binders[i].type;
      }
      out += ". ";
      print(f->children[0], 0, out);
      break;
    }
  }
  if (paren) out += ')';
}

// Program precedence: star 4 (postfix), seq 3, choice 2, conc 1.
inline int prec(const Program& p) {
  switch (p.kind) {
    case PKind::Conc: return 1;
    case PKind::Choice: return 2;
    case PKind::Seq: return 3;
    default: return 4;
  }
}

inline void print(const ProgramPtr& p, int min_prec, std::string& out) {
  if (is_nil(p)) {
    out += "nil";
    return;
  }
  bool paren = prec(*p) < min_prec;
  if (paren) out += '(';
  switch (p->kind) {
    case PKind::Act: out += to_string(p->act); break;
    case PKind::Test: {
      out += "?(";
      print(p->test, 0, out);
      out += ')';
      break;
    }
    case PKind::Seq:
    case PKind::Choice:
    case PKind::Conc: {
      int self = prec(*p);
      const char* sep = p->kind == PKind::Seq     ? "; "
                        : p->kind == PKind::Choice ? " | "
                                                   : " || ";
      print(p->children[0], self, out);
      out += sep;
      print(p->children[1], self + 1, out);
      break;
    }
    case PKind::Star:
      print(p->children[0], 5, out);
      out += '*';
      break;
  }
  if (paren) out += ')';
}

// MTL precedence: atom 4, not 3, and 2, or 1, until 0 (right associative).
inline int prec(const Mtl& m) {
  switch (m.kind) {
    case MKind::Until: return 0;
    case MKind::Or: return 1;
    case MKind::And: return 2;
    case MKind::Not: return 3;
    default: return 4;
  }
}

inline void print(const MtlPtr& m, int min_prec, std::string& out) {
  bool paren = prec(*m) < min_prec;
  if (paren) out += '(';
  switch (m->kind) {
    case MKind::True: out += "true"; break;
    case MKind::False: out += "false"; break;
    case MKind::Atom: {
      out += m->pred;
      if (!m->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < m->args.size(); ++i) {
          if (i) out += ", ";
          out += m->args[i].name;
        }
        out += ')';
      }
      break;
    }
    case MKind::Not:
      out += '!';
      print(m->children[0], 4, out);
      break;
    case MKind::And:
    case MKind::Or: {
      int self = prec(*m);
      const char* sep = m->kind == MKind::And ? " & " : " | ";
      print(m->children[0], self, out);
      out += sep;
      print(m->children[1], self + 1, out);
      break;
    }
    case MKind::Until:
      print(m->children[0], 1, out);
      out += " U";
      out += to_string(m->ivl);
      out += ' ';
      print(m->children[1], 0, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

inline std::string to_string(const FormulaPtr& f) {
  std::string out;
  detail::print(f, 0, out);
  return out;
}

inline std::string to_string(const ProgramPtr& p) {
  std::string out;
  detail::print(p, 0, out);
  return out;
}

inline std::string to_string(const MtlPtr& m) {
  std::string out;
  detail::print(m, 0, out);
  return out;
}

inline std::string to_string(const Guard& g) {
  if (g.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += " & ";
    out += g[i].clock;
    out += ' ';
    out += to_symbol(g[i].op);
    out += ' ';
    out += tgs::to_string(g[i].bound);
  }
  return out;
}

// Reconstructs a complete .tgs document. Reparsing the result yields a
// structurally equal SourceSpec.
inline std::string print_spec(const SourceSpec& spec) {
  std::string out;
  if (!spec.objects.empty()) {
    out += "objects {";
    for (const auto& o : spec.objects) out += " " + o.name + ": " + o.type + ";";
    out += " }\n";
  }
  if (!spec.fluents.empty()) {
    out += "fluents {";
    for (const auto& f : spec.fluents) {
      out += " " + f.name;
      if (!f.arg_types.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.arg_types.size(); ++i) {
          if (i) out += ", ";
          out += f.arg_types[i];
        }
        out += ')';
      }
      out += ';';
    }
    out += " }\n";
  }
  if (!spec.clocks.empty()) {
    out += "clocks {";
    for (const auto& c : spec.clocks) out += " " + c + ";";
    out += " }\n";
  }
  for (const auto& a : spec.actions) {
    out += "action " + a.name;
    if (!a.params.empty()) {
      out += '(';
      for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (i) out += ", ";
        out += a.params[i].var + ": " + a.params[i].type;
      }
      out += ')';
    }
    out += " {\n";
    out += "  owner: ";
    out += a.owner == Owner::Controller ? "controller" : "environment";
    out += ";\n";
    out += "  pre: " + to_string(a.pre) + ";\n";
    if (!a.guard.empty()) out += "  guard: " + to_string(a.guard) + ";\n";
    out += "}\n";
  }
  for (const auto& s : spec.ssas) {
    out += "ssa " + s.fluent;
    if (!s.params.empty()) {
      out += '(';
      for (std::size_t i = 0; i < s.params.size(); ++i) {
        if (i) out += ", ";
        out += s.params[i].var + ": " + s.params[i].type;
      }
      out += ')';
    }
    out += ": " + to_string(s.rhs) + ";\n";
  }
  for (const auto& r : spec.resets)
    out += "reset " + r.clock + ": " + to_string(r.rhs) + ";\n";
  out += "init {";
  for (const auto& i : spec.init) {
    out += " " + i.pred;
    if (!i.args.empty()) {
      out += '(';
      for (std::size_t k = 0; k < i.args.size(); ++k) {
        if (k) out += ", ";
        out += i.args[k];
      }
      out += ')';
    }
    out += ';';
  }
  out += " }\n";
  out += "program: " + to_string(spec.program) + ";\n";
  out += "spec_bad: " + to_string(spec.spec_bad) + ";\n";
  return out;
}

}  // namespace tgs::ast
