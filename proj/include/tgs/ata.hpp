#pragma once

// One-clock alternating timed automaton for a scaled MTL formula: positive
// normal form with dual-until, symbolic per-symbol transitions in disjunctive
// form, minimal-model enumeration, and flow/edge-step acceptance.

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/mtl.hpp"
#include "tgs/rational.hpp"
#include "tgs/source_ast.hpp"

namespace tgs::ata {

// ---------------------------------------------------------------------------
// Positive normal form: negation only on atoms, with dual-until as the
// De Morgan partner of until.

struct Pnf;
using PnfPtr = std::shared_ptr<const Pnf>;

struct Pnf {
  enum class Kind { True, False, Atom, NotAtom, And, Or, Until, DualUntil };
  Kind kind = Kind::True;
  AtomId atom = 0;
  PnfPtr lhs, rhs;
  ast::Interval ivl;
};

inline PnfPtr pnf_leaf(Pnf::Kind kind, AtomId atom = 0) {
  Pnf p;
  p.kind = kind;
  p.atom = atom;
  return std::make_shared<const Pnf>(std::move(p));
}

inline PnfPtr pnf_node(Pnf::Kind kind, PnfPtr lhs, PnfPtr rhs,
                       ast::Interval ivl = {}) {
  Pnf p;
  p.kind = kind;
  p.lhs = std::move(lhs);
  p.rhs = std::move(rhs);
  p.ivl = ivl;
  return std::make_shared<const Pnf>(std::move(p));
}

inline bool is_temporal(const Pnf& p) {
  return p.kind == Pnf::Kind::Until || p.kind == Pnf::Kind::DualUntil;
}

inline int compare(const ast::Interval& a, const ast::Interval& b) {
  auto key = [](const ast::Interval& i) {
    return std::tuple<Rational, bool, bool, Rational, bool>(
        i.lo, i.lo_strict, i.hi_inf, i.hi_inf ? Rational(0) : i.hi,
        i.hi_strict);
  };
  auto ka = key(a), kb = key(b);
  return ka < kb ? -1 : kb < ka ? 1 : 0;
}

inline int compare(const PnfPtr& a, const PnfPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case Pnf::Kind::True:
    case Pnf::Kind::False: return 0;
    case Pnf::Kind::Atom:
    case Pnf::Kind::NotAtom:
      return a->atom < b->atom ? -1 : a->atom > b->atom ? 1 : 0;
    case Pnf::Kind::Until:
    case Pnf::Kind::DualUntil:
      if (int c = compare(a->ivl, b->ivl)) return c;
      [[fallthrough]];
    case Pnf::Kind::And:
    case Pnf::Kind::Or:
      if (int c = compare(a->lhs, b->lhs)) return c;
      return compare(a->rhs, b->rhs);
  }
  throw std::logic_error("unreachable");
}

inline bool equals(const PnfPtr& a, const PnfPtr& b) {
  return compare(a, b) == 0;
}

// Pushes negations to the literals; negated until becomes dual-until over
// the negated operands and vice versa.
inline PnfPtr to_pnf(const mtl::FormulaPtr& f, bool negated = false) {
  switch (f->kind) {
    case mtl::Kind::True:
      return pnf_leaf(negated ? Pnf::Kind::False : Pnf::Kind::True);
    case mtl::Kind::False:
      return pnf_leaf(negated ? Pnf::Kind::True : Pnf::Kind::False);
    case mtl::Kind::Atom:
      return pnf_leaf(negated ? Pnf::Kind::NotAtom : Pnf::Kind::Atom,
                      f->atom);
    case mtl::Kind::Not: return to_pnf(f->children[0], !negated);
    case mtl::Kind::And:
    case mtl::Kind::Or: {
      bool conj = (f->kind == mtl::Kind::And) != negated;
      PnfPtr lhs = to_pnf(f->children[0], negated);
      PnfPtr rhs = to_pnf(f->children[1], negated);
      return pnf_node(conj ? Pnf::Kind::And : Pnf::Kind::Or, std::move(lhs),
                      std::move(rhs));
    }
    case mtl::Kind::Until: {
      PnfPtr lhs = to_pnf(f->children[0], negated);
      PnfPtr rhs = to_pnf(f->children[1], negated);
      return pnf_node(negated ? Pnf::Kind::DualUntil : Pnf::Kind::Until,
                      std::move(lhs), std::move(rhs), f->ivl);
    }
  }
  throw std::logic_error("unreachable");
}

// Renders the normal form; dual-until prints with the operator R.
inline std::string to_string(const PnfPtr& p,
                             const std::vector<std::string>& atom_names,
                             int min_prec = 0) {
  // Precedence: until/dual-until 0 (right associative), or 1, and 2, atom 3.
  std::string out;
  int self = 3;
  switch (p->kind) {
    case Pnf::Kind::True: out = "true"; break;
    case Pnf::Kind::False: out = "false"; break;
    case Pnf::Kind::Atom: out = atom_names.at(p->atom); break;
    case Pnf::Kind::NotAtom: out = "!" + atom_names.at(p->atom); break;
    case Pnf::Kind::And:
    case Pnf::Kind::Or: {
      self = p->kind == Pnf::Kind::And ? 2 : 1;
      out = to_string(p->lhs, atom_names, self) +
            (p->kind == Pnf::Kind::And ? " & " : " | ") +
            to_string(p->rhs, atom_names, self + 1);
      break;
    }
    case Pnf::Kind::Until:
    case Pnf::Kind::DualUntil: {
      self = 0;
      out = to_string(p->lhs, atom_names, 1) +
            (p->kind == Pnf::Kind::Until ? " U" : " R") +
            ast::to_string(p->ivl) + " " + to_string(p->rhs, atom_names, 0);
      break;
    }
  }
  return self < min_prec ? "(" + std::move(out) + ")" : out;
}

// ---------------------------------------------------------------------------
// Transition formulas in disjunctive form. Each disjunct conjoins one clock
// range (over the single automaton clock) with a set of location atoms; a
// location spawned through a clock reset enters with value zero.

struct ClockRange {
  long long lo = 0;
  bool lo_strict = false;
  bool hi_inf = true;
  long long hi = 0;
  bool hi_strict = false;

  bool operator==(const ClockRange&) const = default;

  bool empty() const {
    return !hi_inf && (lo > hi || (lo == hi && (lo_strict || hi_strict)));
  }
  bool is_trivial() const {
    return lo == 0 && !lo_strict && hi_inf;
  }
  bool contains(const Rational& v) const {
    if (lo_strict ? v <= Rational(lo) : v < Rational(lo)) return false;
    if (hi_inf) return true;
    return hi_strict ? v < Rational(hi) : v <= Rational(hi);
  }
  // Whether this range includes every point of the other.
  bool covers(const ClockRange& o) const {
    bool lo_ok = lo < o.lo || (lo == o.lo && (!lo_strict || o.lo_strict));
    bool hi_ok = hi_inf || (!o.hi_inf &&
                            (hi > o.hi || (hi == o.hi &&
                                           (!hi_strict || o.hi_strict))));
    return lo_ok && hi_ok;
  }
};

inline ClockRange intersect(const ClockRange& a, const ClockRange& b) {
  ClockRange r;
  if (a.lo > b.lo || (a.lo == b.lo && a.lo_strict)) {
    r.lo = a.lo;
    r.lo_strict = a.lo_strict;
  } else {
    r.lo = b.lo;
    r.lo_strict = b.lo_strict;
  }
  if (a.hi_inf) {
    r.hi_inf = b.hi_inf;
    r.hi = b.hi;
    r.hi_strict = b.hi_strict;
  } else if (b.hi_inf || a.hi < b.hi || (a.hi == b.hi && a.hi_strict)) {
    r.hi_inf = false;
    r.hi = a.hi;
    r.hi_strict = a.hi_strict;
  } else {
    r.hi_inf = false;
    r.hi = b.hi;
    r.hi_strict = b.hi_strict;
  }
  return r;
}

inline std::string to_string(const ClockRange& r) {
  if (r.is_trivial()) return "true";
  if (!r.hi_inf && r.lo == r.hi) return "x == " + std::to_string(r.lo);
  std::string lo_part, hi_part;
  if (r.lo != 0 || r.lo_strict)
    lo_part = std::string("x ") + (r.lo_strict ? "> " : ">= ") +
              std::to_string(r.lo);
  if (!r.hi_inf)
    hi_part = std::string("x ") + (r.hi_strict ? "< " : "<= ") +
              std::to_string(r.hi);
  if (lo_part.empty()) return hi_part;
  if (hi_part.empty()) return lo_part;
  return lo_part + " & " + hi_part;
}

struct LocRef {
  LocationId loc = 0;
  bool reset = false;
  bool operator==(const LocRef&) const = default;
  bool operator<(const LocRef& o) const {
    return loc < o.loc || (loc == o.loc && reset < o.reset);
  }
};

struct Disjunct {
  ClockRange range;
  std::set<LocRef> locs;
  bool operator==(const Disjunct&) const = default;
};

inline bool disjunct_less(const Disjunct& a, const Disjunct& b) {
  auto key = [](const ClockRange& r) {
    return std::tuple<long long, bool, bool, long long, bool>(
        r.lo, r.lo_strict, !r.hi_inf, r.hi_inf ? 0 : r.hi, r.hi_strict);
  };
  if (key(a.range) != key(b.range)) return key(a.range) < key(b.range);
  return a.locs < b.locs;
}

// Empty vector is falsum; a single disjunct with trivial range and no
// location atoms is verum.
using TransitionFormula = std::vector<Disjunct>;

inline TransitionFormula tf_false() { return {}; }
inline TransitionFormula tf_true() { return {Disjunct{}}; }

// Drops unsatisfiable disjuncts, deduplicates, removes disjuncts implied by
// a weaker one, and sorts canonically.
inline TransitionFormula normalize(TransitionFormula tf) {
  TransitionFormula kept;
  for (auto& d : tf)
    if (!d.range.empty()) kept.push_back(std::move(d));
  TransitionFormula out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < kept.size() && !redundant; ++j) {
      if (i == j) continue;
      // Disjunct j absorbs i when it is no stronger: fewer location
      // obligations over a wider clock range. Ties break toward the
      // earlier disjunct so exact duplicates keep one copy.
      bool absorbs = std::includes(kept[i].locs.begin(), kept[i].locs.end(),
                                   kept[j].locs.begin(), kept[j].locs.end()) &&
                     kept[j].range.covers(kept[i].range);
      if (absorbs && kept[i] == kept[j]) absorbs = j < i;
      redundant = absorbs;
    }
    if (!redundant) out.push_back(kept[i]);
  }
  std::sort(out.begin(), out.end(), disjunct_less);
  return out;
}

inline TransitionFormula tf_or(const TransitionFormula& a,
                               const TransitionFormula& b) {
  TransitionFormula out = a;
  out.insert(out.end(), b.begin(), b.end());
  return normalize(std::move(out));
}

inline TransitionFormula tf_and(const TransitionFormula& a,
                                const TransitionFormula& b) {
  TransitionFormula out;
  for (const auto& da : a)
    for (const auto& db : b) {
      Disjunct d;
      d.range = intersect(da.range, db.range);
      if (d.range.empty()) continue;
      d.locs = da.locs;
      d.locs.insert(db.locs.begin(), db.locs.end());
      out.push_back(std::move(d));
    }
  return normalize(std::move(out));
}

namespace detail {

inline long long integer_bound(const Rational& r) {
  if (r.denominator() != 1)
    throw std::logic_error("automaton constant is not an integer");
  return r.numerator();
}

// x ∈ I as a single clock range.
inline ClockRange range_in(const ast::Interval& ivl) {
  ClockRange r;
  r.lo = integer_bound(ivl.lo);
  r.lo_strict = ivl.lo_strict;
  if (!ivl.hi_inf) {
    r.hi_inf = false;
    r.hi = integer_bound(ivl.hi);
    r.hi_strict = ivl.hi_strict;
  }
  return r;
}

// x ∉ I as a disjunction of at most two clock ranges.
inline TransitionFormula ranges_not_in(const ast::Interval& ivl) {
  TransitionFormula out;
  ClockRange below;
  below.hi_inf = false;
  below.hi = integer_bound(ivl.lo);
  below.hi_strict = !ivl.lo_strict;
  if (!below.empty()) out.push_back(Disjunct{below, {}});
  if (!ivl.hi_inf) {
    ClockRange above;
    above.lo = integer_bound(ivl.hi);
    above.lo_strict = !ivl.hi_strict;
    out.push_back(Disjunct{above, {}});
  }
  return normalize(std::move(out));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The automaton: one location per temporal subformula, plus the root as the
// initial location. Until locations are non-accepting, dual-until locations
// accepting.

struct Ata {
  PnfPtr root;
  std::vector<PnfPtr> locations;  // index 0 is the initial location
  std::vector<bool> accepting;

  LocationId location_of(const PnfPtr& f) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (equals(locations[i], f)) return static_cast<LocationId>(i);
    throw std::logic_error("formula is not a location");
  }
};

namespace detail {

inline void collect_temporal(const PnfPtr& f, std::vector<PnfPtr>& out) {
  if (is_temporal(*f)) {
    bool seen = false;
    for (const auto& g : out) seen = seen || equals(g, f);
    if (!seen) out.push_back(f);
  }
  if (f->lhs) collect_temporal(f->lhs, out);
  if (f->rhs) collect_temporal(f->rhs, out);
}

}  // namespace detail

inline Ata build_ata(const mtl::FormulaPtr& phi) {
  Ata a;
  a.root = to_pnf(phi);
  if (!is_temporal(*a.root)) a.locations.push_back(a.root);
  detail::collect_temporal(a.root, a.locations);
  for (const auto& l : a.locations)
    a.accepting.push_back(l->kind == Pnf::Kind::DualUntil);
  return a;
}

namespace detail {

// Maps the propositional structure of a formula over the symbol; temporal
// subformulas become location atoms spawned with a clock reset.
inline TransitionFormula now(const Ata& a, const PnfPtr& f,
                             const std::set<AtomId>& symbol) {
  switch (f->kind) {
    case Pnf::Kind::True: return tf_true();
    case Pnf::Kind::False: return tf_false();
    case Pnf::Kind::Atom:
      return symbol.count(f->atom) ? tf_true() : tf_false();
    case Pnf::Kind::NotAtom:
      return symbol.count(f->atom) ? tf_false() : tf_true();
    case Pnf::Kind::And:
      return tf_and(now(a, f->lhs, symbol), now(a, f->rhs, symbol));
    case Pnf::Kind::Or:
      return tf_or(now(a, f->lhs, symbol), now(a, f->rhs, symbol));
    case Pnf::Kind::Until:
    case Pnf::Kind::DualUntil: {
      Disjunct d;
      d.locs.insert(LocRef{a.location_of(f), true});
      return {d};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// The symbolic transition for a location on one symbol-set, computed on
// demand. An until fires its right operand inside the interval or keeps
// waiting on its left operand; dual-until is the conjunctive dual.
inline TransitionFormula delta(const Ata& a, LocationId l,
                               const std::set<AtomId>& symbol) {
  const PnfPtr& f = a.locations.at(l);
  if (f->kind == Pnf::Kind::Until) {
    Disjunct in_window{detail::range_in(f->ivl), {}};
    Disjunct wait;
    wait.locs.insert(LocRef{l, false});
    return tf_or(
        tf_and(detail::now(a, f->rhs, symbol), TransitionFormula{in_window}),
        tf_and(detail::now(a, f->lhs, symbol), TransitionFormula{wait}));
  }
  if (f->kind == Pnf::Kind::DualUntil) {
    Disjunct wait;
    wait.locs.insert(LocRef{l, false});
    return tf_and(
        tf_or(detail::now(a, f->rhs, symbol), detail::ranges_not_in(f->ivl)),
        tf_or(detail::now(a, f->lhs, symbol), TransitionFormula{wait}));
  }
  return detail::now(a, f, symbol);
}

// The transition used for the first letter: the word's position zero is the
// initial state itself, so the root formula is mapped over it directly and
// every temporal obligation starts its clock at zero.
inline TransitionFormula initial_delta(const Ata& a,
                                       const std::set<AtomId>& symbol) {
  return detail::now(a, a.root, symbol);
}

inline std::string to_string(const TransitionFormula& tf, const Ata& a,
                             const std::vector<std::string>& atom_names) {
  if (tf.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < tf.size(); ++i) {
    if (i) out += " | ";
    const Disjunct& d = tf[i];
    std::vector<std::string> parts;
    if (!d.range.is_trivial() || d.locs.empty())
      parts.push_back(to_string(d.range));
    for (const auto& lr : d.locs)
      parts.push_back((lr.reset ? "x.(" : "(") +
                      to_string(a.locations.at(lr.loc), atom_names) + ")");
    std::string piece;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (j) piece += " & ";
      piece += parts[j];
    }
    out += parts.size() > 1 && tf.size() > 1 ? "(" + piece + ")" : piece;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configurations and runs.

using State = std::pair<LocationId, Rational>;
using Configuration = std::set<State>;
using ConfigurationSet = std::set<Configuration>;

// All subset-minimal models of the formula at clock value v. Location atoms
// contribute the state (loc, 0) when spawned through a reset and (loc, v)
// otherwise; a satisfied disjunct with no location atoms contributes the
// empty model, which then absorbs everything else.
inline ConfigurationSet minimal_models(const TransitionFormula& tf,
                                       const Rational& v) {
  std::vector<Configuration> candidates;
  for (const auto& d : tf) {
    if (!d.range.contains(v)) continue;
    Configuration m;
    for (const auto& lr : d.locs)
      m.insert({lr.loc, lr.reset ? Rational(0) : v});
    candidates.push_back(std::move(m));
  }
  ConfigurationSet out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < candidates.size() && minimal; ++j) {
      if (i == j) continue;
      bool subset = std::includes(candidates[i].begin(), candidates[i].end(),
                                  candidates[j].begin(), candidates[j].end());
      if (subset && candidates[i] == candidates[j]) subset = j < i;
      minimal = !subset;
    }
    if (minimal) out.insert(candidates[i]);
  }
  return out;
}

inline Configuration flow_step(const Configuration& g, const Rational& t) {
  Configuration out;
  for (const auto& [loc, v] : g) out.insert({loc, v + t});
  return out;
}

// Every way of replacing each member state by one minimal model of its
// transition on the symbol, unioned. A member with no model kills all
// combinations; the empty configuration has exactly itself as successor.
inline ConfigurationSet edge_step(const Ata& a, const Configuration& g,
                                  const std::set<AtomId>& symbol) {
  ConfigurationSet partial;
  partial.insert(Configuration{});
  for (const auto& [loc, v] : g) {
    ConfigurationSet models = minimal_models(delta(a, loc, symbol), v);
    if (models.empty()) return {};
    ConfigurationSet grown;
    for (const auto& base : partial)
      for (const auto& m : models) {
        Configuration u = base;
        u.insert(m.begin(), m.end());
        grown.insert(std::move(u));
      }
    partial = std::move(grown);
  }
  return partial;
}

inline bool accepting_configuration(const Ata& a, const Configuration& g) {
  for (const auto& [loc, v] : g) {
    (void)v;
    if (!a.accepting.at(loc)) return false;
  }
  return true;
}

// Existential acceptance over minimal-model choices: consume position zero
// with the initial transition, then alternate clock flow and edge steps.
inline bool accepts(const Ata& a, const mtl::TimedWord& word) {
  if (word.empty()) return false;
  ConfigurationSet frontier = minimal_models(
      initial_delta(a, word[0].atoms), Rational(0));
  for (std::size_t i = 1; i < word.size() && !frontier.empty(); ++i) {
    Rational delay = word[i].time - word[i - 1].time;
    ConfigurationSet next;
    for (const auto& g : frontier)
      for (const auto& h : edge_step(a, flow_step(g, delay), word[i].atoms))
        next.insert(h);
    frontier = std::move(next);
  }
  for (const auto& g : frontier)
    if (accepting_configuration(a, g)) return true;
  return false;
}

}  // namespace tgs::ata
