#pragma once

// Metric temporal logic over finite timed words, pointwise semantics with
// strict until. Times are exact rationals; scaling maps rational constants
// to integers without changing satisfaction.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/rational.hpp"
#include "tgs/source_ast.hpp"

namespace tgs::mtl {

struct TimedLetter {
  std::set<AtomId> atoms;
  Rational time{0};
};

using TimedWord = std::vector<TimedLetter>;

enum class Kind { True, False, Atom, Not, And, Or, Until };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Kind kind;
  AtomId atom = 0;
  std::vector<FormulaPtr> children;
  ast::Interval ivl;  // Until
};

inline FormulaPtr f_true() {
  static FormulaPtr t = std::make_shared<Formula>(Formula{Kind::True});
  return t;
}
inline FormulaPtr f_false() {
  static FormulaPtr f = std::make_shared<Formula>(Formula{Kind::False});
  return f;
}
inline FormulaPtr f_atom(AtomId atom) {
  Formula f{Kind::Atom};
  f.atom = atom;
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_not(FormulaPtr child) {
  Formula f{Kind::Not};
  f.children.push_back(std::move(child));
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_and(FormulaPtr lhs, FormulaPtr rhs) {
  Formula f{Kind::And};
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_or(FormulaPtr lhs, FormulaPtr rhs) {
  Formula f{Kind::Or};
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return std::make_shared<Formula>(std::move(f));
}
inline FormulaPtr f_until(ast::Interval ivl, FormulaPtr lhs, FormulaPtr rhs) {
  Formula f{Kind::Until};
  f.ivl = ivl;
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return std::make_shared<Formula>(std::move(f));
}

inline bool equals(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  if (a->kind == Kind::Atom) return a->atom == b->atom;
  if (a->kind == Kind::Until && !(a->ivl == b->ivl)) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!equals(a->children[i], b->children[i])) return false;
  return true;
}

// Structural order for use as a map key downstream.
inline int compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->kind == Kind::Atom)
    return a->atom == b->atom ? 0 : (a->atom < b->atom ? -1 : 1);
  if (a->kind == Kind::Until) {
    const auto& x = a->ivl;
    const auto& y = b->ivl;
    if (x.lo != y.lo) return x.lo < y.lo ? -1 : 1;
    if (x.lo_strict != y.lo_strict) return x.lo_strict ? -1 : 1;
    if (x.hi_inf != y.hi_inf) return x.hi_inf ? -1 : 1;
    if (!x.hi_inf) {
      if (x.hi != y.hi) return x.hi < y.hi ? -1 : 1;
      if (x.hi_strict != y.hi_strict) return x.hi_strict ? -1 : 1;
    }
  }
  if (a->children.size() != b->children.size())
    return a->children.size() < b->children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (int c = compare(a->children[i], b->children[i])) return c;
  return 0;
}

// Compiles a parsed ground formula to atom ids, scaling interval endpoints
// by the given factor. Unknown atoms are an error when the table is fixed;
// with extend=true they are added (used for bare formulas in tests).
struct AtomTable {
  std::map<std::string, AtomId> ids;
  std::vector<std::string> names;

  AtomId intern(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    AtomId id = static_cast<AtomId>(names.size());
    ids.emplace(name, id);
    names.push_back(name);
    return id;
  }
};

inline std::string canonical_atom(const std::string& pred,
                                  const std::vector<ast::Term>& args) {
  if (args.empty()) return pred;
  std::string out = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].name;
  }
  return out + ")";
}

inline ast::Interval scale_interval(const ast::Interval& ivl,
                                    const Rational& scale) {
  ast::Interval out = ivl;
  out.lo = ivl.lo * scale;
  if (!ivl.hi_inf) out.hi = ivl.hi * scale;
  return out;
}

inline FormulaPtr compile(const ast::MtlPtr& m, AtomTable& table,
                          bool extend, const Rational& scale = Rational(1)) {
  switch (m->kind) {
    case ast::MKind::True: return f_true();
    case ast::MKind::False: return f_false();
    case ast::MKind::Atom: {
      std::string name = canonical_atom(m->pred, m->args);
      if (!extend && !table.ids.count(name))
        throw Diagnostic(SourceLoc{}, "unknown atom '" + name + "'");
      return f_atom(table.intern(name));
    }
    case ast::MKind::Not:
      return f_not(compile(m->children[0], table, extend, scale));
    case ast::MKind::And:
    case ast::MKind::Or:
    case ast::MKind::Until: {
      // Interning must see the left child first.
      FormulaPtr lhs = compile(m->children[0], table, extend, scale);
      FormulaPtr rhs = compile(m->children[1], table, extend, scale);
      if (m->kind == ast::MKind::And)
        return f_and(std::move(lhs), std::move(rhs));
      if (m->kind == ast::MKind::Or)
        return f_or(std::move(lhs), std::move(rhs));
      return f_until(scale_interval(m->ivl, scale), std::move(lhs),
                     std::move(rhs));
    }
  }
  throw std::logic_error("unreachable");
}

inline FormulaPtr scale_formula(const FormulaPtr& f, const Rational& scale) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return f_not(scale_formula(f->children[0], scale));
    case Kind::And:
      return f_and(scale_formula(f->children[0], scale),
                   scale_formula(f->children[1], scale));
    case Kind::Or:
      return f_or(scale_formula(f->children[0], scale),
                  scale_formula(f->children[1], scale));
    case Kind::Until:
      return f_until(scale_interval(f->ivl, scale),
                     scale_formula(f->children[0], scale),
                     scale_formula(f->children[1], scale));
  }
  throw std::logic_error("unreachable");
}

// Pointwise satisfaction at a position. Until is strict: the witness j and
// all intermediate positions lie strictly after i.
inline bool check(const TimedWord& word, const FormulaPtr& f,
                  std::size_t position) {
  if (position >= word.size())
    throw std::out_of_range("check position past end of word");
  switch (f->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return word[position].atoms.count(f->atom) > 0;
    case Kind::Not: return !check(word, f->children[0], position);
    case Kind::And:
      return check(word, f->children[0], position) &&
             check(word, f->children[1], position);
    case Kind::Or:
      return check(word, f->children[0], position) ||
             check(word, f->children[1], position);
    case Kind::Until: {
      for (std::size_t j = position + 1; j < word.size(); ++j) {
        if (f->ivl.contains(word[j].time - word[position].time) &&
            check(word, f->children[1], j)) {
          bool mid = true;
          for (std::size_t k = position + 1; k < j && mid; ++k)
            mid = check(word, f->children[0], k);
          if (mid) return true;
        }
      }
      return false;
    }
  }
  throw std::logic_error("unreachable");
}

inline bool check(const TimedWord& word, const FormulaPtr& f) {
  return !word.empty() && check(word, f, 0);
}

inline std::string to_string(const FormulaPtr& f,
                             const std::vector<std::string>& atom_names,
                             int prec = 0) {
  auto wrap = [&](int self, const std::string& body) {
    return prec > self ? "(" + body + ")" : body;
  };
  switch (f->kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return atom_names.at(f->atom);
    case Kind::Not: return "!" + to_string(f->children[0], atom_names, 3);
    case Kind::And:
      return wrap(2, to_string(f->children[0], atom_names, 2) + " & " +
                         to_string(f->children[1], atom_names, 3));
    case Kind::Or:
      return wrap(1, to_string(f->children[0], atom_names, 1) + " | " +
                         to_string(f->children[1], atom_names, 2));
    case Kind::Until:
      return wrap(0, to_string(f->children[0], atom_names, 1) + " U" +
                         ast::to_string(f->ivl) + " " +
                         to_string(f->children[1], atom_names, 0));
  }
  throw std::logic_error("unreachable");
}

}  // namespace tgs::mtl
