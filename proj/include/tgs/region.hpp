#pragma once

// Region abstraction for one bounded constant K: region indices over
// [0, 2K+1], canonical region words over program clocks and automaton
// locations partitioned by fractional part, time-successor rotation, and the
// region-level automaton edge step.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tgs/ata.hpp"
#include "tgs/basics.hpp"
#include "tgs/ground.hpp"
#include "tgs/rational.hpp"

namespace tgs::region {

using RegionIndex = std::uint32_t;

// Even index 2i is the point {i}, odd index 2i+1 the open interval (i, i+1),
// and 2K+1 the unbounded tail (K, ∞).
inline RegionIndex reg(const Rational& v, long long k) {
  if (v < Rational(0)) throw std::logic_error("negative clock value");
  if (v > Rational(k)) return static_cast<RegionIndex>(2 * k + 1);
  long long whole = rat_floor(v);
  bool exact = is_integer(v);
  return static_cast<RegionIndex>(exact ? 2 * whole : 2 * whole + 1);
}

// Decides v ⋈ bound for every value v in the region; constants above K are
// not decidable at this abstraction and indicate an internal error.
inline bool region_cmp(RegionIndex r, CmpOp op, long long bound,
                       long long k) {
  if (bound > k)
    throw std::logic_error("comparison constant exceeds the region bound");
  if (r == static_cast<RegionIndex>(2 * k + 1)) {
    // v > K ≥ bound
    return op == CmpOp::Ge || op == CmpOp::Gt;
  }
  if (r % 2 == 0) return cmp_holds(Rational(r / 2), op, Rational(bound));
  long long i = (r - 1) / 2;  // v ∈ (i, i+1)
  switch (op) {
    case CmpOp::Lt:
    case CmpOp::Le: return bound >= i + 1;
    case CmpOp::Eq: return false;
    case CmpOp::Ge:
    case CmpOp::Gt: return bound <= i;
  }
  throw std::logic_error("unreachable");
}

// One entry of a region word: a program clock or an automaton location,
// abstracted to its region. Clocks order before locations for stable output.
struct Letter {
  bool is_clock = true;
  std::uint32_t id = 0;
  RegionIndex region = 0;

  bool operator==(const Letter&) const = default;
  bool operator<(const Letter& o) const {
    return std::tuple(!is_clock, id, region) <
           std::tuple(!o.is_clock, o.id, o.region);
  }
};

using LetterSet = std::set<Letter>;

// Ordered letter-classes: an optional leading point class (integer values
// ≤ K), fractional classes by strictly increasing fractional part, and one
// trailing class holding everything beyond K.
struct CanonicalWord {
  long long k = 0;
  std::vector<LetterSet> classes;

  bool operator==(const CanonicalWord&) const = default;
  bool operator<(const CanonicalWord& o) const {
    return std::tie(k, classes) < std::tie(o.k, o.classes);
  }
};

namespace detail {

inline bool is_unbounded(RegionIndex r, long long k) {
  return r == static_cast<RegionIndex>(2 * k + 1);
}

inline bool is_point(RegionIndex r, long long k) {
  return !is_unbounded(r, k) && r % 2 == 0;
}

}  // namespace detail

// Abstraction of a concrete pair (clock valuation, automaton configuration).
inline CanonicalWord canonical_word(const std::vector<Rational>& nu,
                                    const ata::Configuration& config,
                                    long long k) {
  LetterSet points, unbounded;
  std::map<Rational, LetterSet> fractional;
  auto place = [&](Letter l, const Rational& v) {
    l.region = reg(v, k);
    if (detail::is_unbounded(l.region, k)) {
      unbounded.insert(l);
    } else if (l.region % 2 == 0) {
      points.insert(l);
    } else {
      fractional[fractional_part(v)].insert(l);
    }
  };
  for (std::size_t c = 0; c < nu.size(); ++c)
    place(Letter{true, static_cast<std::uint32_t>(c), 0}, nu[c]);
  for (const auto& [loc, v] : config) place(Letter{false, loc, 0}, v);

  CanonicalWord w;
  w.k = k;
  if (!points.empty()) w.classes.push_back(std::move(points));
  for (auto& [f, cls] : fractional) w.classes.push_back(std::move(cls));
  if (!unbounded.empty()) w.classes.push_back(std::move(unbounded));
  return w;
}

namespace detail {

// One elapse event. The point class (when present) slides into a fresh
// smallest-fraction class, entries at K falling into the unbounded tail;
// otherwise the largest-fraction class reaches the next integer point.
// Fixpoint when only the unbounded class (or nothing) remains.
inline CanonicalWord rotate_once(const CanonicalWord& w) {
  const long long k = w.k;
  if (w.classes.empty()) return w;

  bool has_trailing = false;
  for (const auto& l : w.classes.back())
    has_trailing = has_trailing || is_unbounded(l.region, k);
  std::size_t n_middle = w.classes.size() - (has_trailing ? 1 : 0);
  if (n_middle == 0) return w;

  bool first_is_point = false;
  for (const auto& l : w.classes.front())
    first_is_point = first_is_point || is_point(l.region, k);

  CanonicalWord out;
  out.k = k;
  LetterSet trailing =
      has_trailing ? w.classes.back() : LetterSet{};

  if (first_is_point) {
    LetterSet fresh;
    for (Letter l : w.classes.front()) {
      if (l.region / 2 < static_cast<RegionIndex>(k)) {
        l.region += 1;
        fresh.insert(l);
      } else {
        l.region = static_cast<RegionIndex>(2 * k + 1);
        trailing.insert(l);
      }
    }
    if (!fresh.empty()) out.classes.push_back(std::move(fresh));
    for (std::size_t i = 1; i < n_middle; ++i)
      out.classes.push_back(w.classes[i]);
  } else {
    LetterSet points;
    for (Letter l : w.classes[n_middle - 1]) {
      l.region += 1;
      points.insert(l);
    }
    out.classes.push_back(std::move(points));
    for (std::size_t i = 0; i + 1 < n_middle; ++i)
      out.classes.push_back(w.classes[i]);
  }
  if (!trailing.empty()) out.classes.push_back(std::move(trailing));
  return out;
}

}  // namespace detail

// All words reachable by letting time pass, including the word itself.
inline std::set<CanonicalWord> time_successors(const CanonicalWord& w) {
  std::set<CanonicalWord> out;
  CanonicalWord cur = w;
  out.insert(cur);
  while (true) {
    CanonicalWord next = detail::rotate_once(cur);
    if (!out.insert(next).second) break;
    cur = std::move(next);
  }
  return out;
}

// Truth of a clock constraint, decided exactly by the regions.
inline bool guard_holds(const CanonicalWord& w, const ground::GuardExpr& g) {
  for (const auto& atom : g) {
    bool found = false;
    for (const auto& cls : w.classes)
      for (const auto& l : cls)
        if (l.is_clock && l.id == atom.clock) {
          if (!region_cmp(l.region, atom.op, atom.bound, w.k)) return false;
          found = true;
        }
    if (!found) throw std::logic_error("clock missing from region word");
  }
  return true;
}

namespace detail {

// Region-level minimal models of a transition formula: clock ranges are
// decided from the region, locations come back as (location, reset) pairs.
inline std::vector<std::set<ata::LocRef>> region_minimal_models(
    const ata::TransitionFormula& tf, RegionIndex r, long long k) {
  auto range_contains = [&](const ata::ClockRange& range) {
    bool lo_ok = region_cmp(r, range.lo_strict ? CmpOp::Gt : CmpOp::Ge,
                            range.lo, k);
    bool hi_ok = range.hi_inf ||
                 region_cmp(r, range.hi_strict ? CmpOp::Lt : CmpOp::Le,
                            range.hi, k);
    return lo_ok && hi_ok;
  };
  std::vector<std::set<ata::LocRef>> candidates;
  for (const auto& d : tf)
    if (range_contains(d.range)) candidates.push_back(d.locs);
  std::vector<std::set<ata::LocRef>> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < candidates.size() && minimal; ++j) {
      if (i == j) continue;
      bool subset = std::includes(candidates[i].begin(), candidates[i].end(),
                                  candidates[j].begin(), candidates[j].end());
      if (subset && candidates[i] == candidates[j]) subset = j < i;
      minimal = !subset;
    }
    if (minimal &&
        std::find(out.begin(), out.end(), candidates[i]) == out.end())
      out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace detail

// The action edge at region level: reset clocks move to the zero point,
// other clocks keep their class; every location letter is replaced by one
// region-level minimal model of its transition on the symbol — kept
// locations stay in the letter's class, spawned locations join the zero
// point. A location letter with no model kills the whole combination.
inline std::set<CanonicalWord> word_edge_step(const CanonicalWord& w,
                                              const std::set<ClockId>& resets,
                                              const std::set<AtomId>& symbol,
                                              const ata::Ata& a) {
  const long long k = w.k;

  // Skeleton: deterministic placements.
  std::vector<LetterSet> kept(w.classes.size());
  LetterSet zero_class;
  struct LocEntry {
    std::size_t cls;
    RegionIndex region;
    std::vector<std::set<ata::LocRef>> models;
  };
  std::vector<LocEntry> pending;

  for (std::size_t ci = 0; ci < w.classes.size(); ++ci)
    for (const Letter& l : w.classes[ci]) {
      if (l.is_clock) {
        if (resets.count(l.id))
          zero_class.insert(Letter{true, l.id, 0});
        else
          kept[ci].insert(l);
      } else {
        LocEntry e;
        e.cls = ci;
        e.region = l.region;
        e.models = detail::region_minimal_models(delta(a, l.id, symbol),
                                                 l.region, k);
        if (e.models.empty()) return {};
        pending.push_back(std::move(e));
      }
    }

  // Enumerate one model per location letter.
  std::set<CanonicalWord> out;
  std::vector<std::size_t> pick(pending.size(), 0);
  while (true) {
    std::vector<LetterSet> classes = kept;
    LetterSet zero = zero_class;
    for (std::size_t i = 0; i < pending.size(); ++i)
      for (const auto& lr : pending[i].models[pick[i]]) {
        if (lr.reset)
          zero.insert(Letter{false, lr.loc, 0});
        else
          classes[pending[i].cls].insert(
              Letter{false, lr.loc, pending[i].region});
      }

    // Reassemble: the zero point merges into the leading point class (or
    // becomes one), then the surviving classes in original order.
    CanonicalWord res;
    res.k = k;
    std::size_t start = 0;
    bool had_point =
        !w.classes.empty() &&
        std::any_of(w.classes[0].begin(), w.classes[0].end(), [&](auto& l) {
          return detail::is_point(l.region, k);
        });
    if (had_point) {
      LetterSet merged = classes[0];
      merged.insert(zero.begin(), zero.end());
      if (!merged.empty()) res.classes.push_back(std::move(merged));
      start = 1;
    } else if (!zero.empty()) {
      res.classes.push_back(zero);
    }
    for (std::size_t ci = start; ci < classes.size(); ++ci)
      if (!classes[ci].empty()) res.classes.push_back(classes[ci]);
    out.insert(std::move(res));

    // Advance the odometer over model choices.
    std::size_t d = 0;
    while (d < pick.size()) {
      if (++pick[d] < pending[d].models.size()) break;
      pick[d] = 0;
      ++d;
    }
    if (d == pick.size()) break;
  }
  return out;
}

// Drops every automaton letter; used when the specification side of a state
// has died but the clock structure must be preserved.
inline CanonicalWord strip_locations(const CanonicalWord& w) {
  CanonicalWord out;
  out.k = w.k;
  for (const auto& cls : w.classes) {
    LetterSet kept;
    for (const auto& l : cls)
      if (l.is_clock) kept.insert(l);
    if (!kept.empty()) out.classes.push_back(std::move(kept));
  }
  return out;
}

// Whether every automaton letter in the word sits in an accepting location;
// true for a word with no automaton letters.
inline bool all_locations_accepting(const CanonicalWord& w,
                                    const ata::Ata& a) {
  for (const auto& cls : w.classes)
    for (const auto& l : cls)
      if (!l.is_clock && !a.accepting.at(l.id)) return false;
  return true;
}

// Stable text form: classes between braces, separated by bars.
inline std::string to_string(const CanonicalWord& w,
                             const std::vector<std::string>& clock_names) {
  std::string out = "[";
  for (std::size_t ci = 0; ci < w.classes.size(); ++ci) {
    if (ci) out += " | ";
    out += "{";
    std::size_t i = 0;
    for (const auto& l : w.classes[ci]) {
      if (i++) out += ", ";
      out += l.is_clock ? clock_names.at(l.id)
                        : "phi" + std::to_string(l.id);
      out += ":r" + std::to_string(l.region);
    }
    out += "}";
  }
  return out + "]";
}

}  // namespace tgs::region
