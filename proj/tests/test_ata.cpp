// Alternating automaton construction and runs: pinned transition entries,
// minimal-model enumeration with exhaustive minimality checks, flow and edge
// steps, and randomized agreement with the direct formula checker.

#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "random_mtl.hpp"
#include "tgs/ata.hpp"
#include "tgs/mtl.hpp"

using namespace tgs;

namespace {

// Atom ids mirror the grounded camera domain: 0 = cam_on, 1 = grasping.
const AtomId cam_on = 0;
const AtomId grasping = 1;

mtl::FormulaPtr phi_bad() {
  return mtl::f_until(ast::interval_upto(Rational(1)), mtl::f_true(),
                      mtl::f_and(mtl::f_not(mtl::f_atom(cam_on)),
                                 mtl::f_atom(grasping)));
}

mtl::FormulaPtr globally(ast::Interval ivl, mtl::FormulaPtr f) {
  return mtl::f_not(
      mtl::f_until(ivl, mtl::f_true(), mtl::f_not(std::move(f))));
}

mtl::TimedLetter letter(std::set<AtomId> atoms, Rational t) {
  mtl::TimedLetter l;
  l.atoms = std::move(atoms);
  l.time = t;
  return l;
}

// Plain satisfaction of a transition formula by an arbitrary state set,
// used to verify minimality and completeness of the enumerated models.
bool is_model(const ata::TransitionFormula& tf, const Rational& v,
              const ata::Configuration& m) {
  for (const auto& d : tf) {
    if (!d.range.contains(v)) continue;
    bool all = true;
    for (const auto& lr : d.locs)
      all = all && m.count({lr.loc, lr.reset ? Rational(0) : v}) > 0;
    if (all) return true;
  }
  return false;
}

long long formula_scale(const mtl::FormulaPtr& f) {
  long long lcd = 1;
  std::function<void(const mtl::FormulaPtr&)> walk =
      [&](const mtl::FormulaPtr& g) {
        if (g->kind == mtl::Kind::Until) {
          lcd = std::lcm(lcd, g->ivl.lo.denominator());
          if (!g->ivl.hi_inf) lcd = std::lcm(lcd, g->ivl.hi.denominator());
        }
        for (const auto& c : g->children) walk(c);
      };
  walk(f);
  return lcd;
}

mtl::TimedWord scale_word(mtl::TimedWord word, const Rational& s) {
  for (auto& l : word) l.time *= s;
  return word;
}

ata::ClockRange upto(long long hi) {
  ata::ClockRange r;
  r.hi_inf = false;
  r.hi = hi;
  return r;
}

}  // namespace

TEST_CASE("grasp specification builds one non-accepting location", "[ata]") {
  auto a = ata::build_ata(phi_bad());
  REQUIRE(a.locations.size() == 1);
  CHECK(a.locations[0]->kind == ata::Pnf::Kind::Until);
  CHECK_FALSE(a.accepting[0]);
  CHECK(a.location_of(a.root) == 0);
}

TEST_CASE("transition entries for the grasp specification", "[ata]") {
  auto a = ata::build_ata(phi_bad());

  ata::Disjunct self;
  self.locs.insert(ata::LocRef{0, false});
  ata::TransitionFormula wait{self};
  ata::TransitionFormula fire_or_wait =
      ata::tf_or(wait, ata::TransitionFormula{ata::Disjunct{upto(1), {}}});

  CHECK(ata::delta(a, 0, {}) == wait);
  CHECK(ata::delta(a, 0, {cam_on}) == wait);
  CHECK(ata::delta(a, 0, {grasping}) == fire_or_wait);
  CHECK(ata::delta(a, 0, {cam_on, grasping}) == wait);

  // The masked symbol keeps only the waiting branch because the right
  // operand needs the camera to be off.
  CHECK(ata::to_string(ata::delta(a, 0, {grasping}), a,
                       {"cam_on", "grasping"}) !=
        ata::to_string(wait, a, {"cam_on", "grasping"}));
}

TEST_CASE("atomic root accepts exactly when the atom holds at the start",
          "[ata]") {
  auto a = ata::build_ata(mtl::f_atom(0));
  REQUIRE(a.locations.size() == 1);

  for (bool p0 : {false, true})
    for (bool p1 : {false, true}) {
      mtl::TimedWord one{letter(p0 ? std::set<AtomId>{0}
                                   : std::set<AtomId>{},
                                Rational(0))};
      mtl::TimedWord two = one;
      two.push_back(letter(p1 ? std::set<AtomId>{0} : std::set<AtomId>{},
                           Rational(1)));
      CHECK(ata::accepts(a, one) == mtl::check(one, mtl::f_atom(0)));
      CHECK(ata::accepts(a, two) == mtl::check(two, mtl::f_atom(0)));
      CHECK(ata::accepts(a, one) == p0);
      CHECK(ata::accepts(a, two) == p0);
    }
}

TEST_CASE("negation produces the dual connectives", "[ata]") {
  auto p = mtl::f_atom(0);
  auto q = mtl::f_atom(1);

  auto dual = ata::to_pnf(mtl::f_not(mtl::f_until(
      ast::interval_upto(Rational(2)), p, q)));
  REQUIRE(dual->kind == ata::Pnf::Kind::DualUntil);
  CHECK(dual->lhs->kind == ata::Pnf::Kind::NotAtom);
  CHECK(dual->rhs->kind == ata::Pnf::Kind::NotAtom);

  auto twice = ata::to_pnf(mtl::f_not(mtl::f_not(p)));
  CHECK(twice->kind == ata::Pnf::Kind::Atom);

  auto de_morgan = ata::to_pnf(mtl::f_not(mtl::f_and(p, q)));
  REQUIRE(de_morgan->kind == ata::Pnf::Kind::Or);
  CHECK(de_morgan->lhs->kind == ata::Pnf::Kind::NotAtom);

  CHECK(ata::to_string(dual, {"p", "q"}) == "!p R[0,2] !q");
}

TEST_CASE("globally formulas make the location accepting", "[ata]") {
  auto g = globally(ast::Interval{}, mtl::f_atom(0));
  auto a = ata::build_ata(g);
  REQUIRE(a.locations.size() == 1);
  CHECK(a.locations[0]->kind == ata::Pnf::Kind::DualUntil);
  CHECK(a.accepting[0]);

  // A run that never violates the obligation ends accepting even though
  // the obligation is still pending.
  mtl::TimedWord word{letter({}, Rational(0)), letter({0}, Rational(1))};
  CHECK(ata::accepts(a, word));
  CHECK(mtl::check(word, g));
  mtl::TimedWord bad{letter({}, Rational(0)), letter({}, Rational(1))};
  CHECK_FALSE(ata::accepts(a, bad));
  CHECK_FALSE(mtl::check(bad, g));
}

TEST_CASE("minimal models of the pinned entry", "[ata]") {
  auto a = ata::build_ata(phi_bad());
  auto tf = ata::delta(a, 0, {grasping});

  auto at_half = ata::minimal_models(tf, Rational(1, 2));
  REQUIRE(at_half.size() == 1);
  CHECK(at_half.count(ata::Configuration{}) == 1);

  auto at_three_halves = ata::minimal_models(tf, Rational(3, 2));
  REQUIRE(at_three_halves.size() == 1);
  CHECK(at_three_halves.count(
            ata::Configuration{{0, Rational(3, 2)}}) == 1);

  CHECK(ata::minimal_models(ata::tf_false(), Rational(1)).empty());
  auto top = ata::minimal_models(ata::tf_true(), Rational(1));
  REQUIRE(top.size() == 1);
  CHECK(top.count(ata::Configuration{}) == 1);
}

TEST_CASE("enumerated models are models, minimal, and complete", "[ata]") {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<int> n_disjuncts(0, 4);
  std::uniform_int_distribution<int> n_locs(0, 3);
  std::uniform_int_distribution<long long> bound(0, 2);
  std::uniform_int_distribution<std::uint32_t> loc(0, 2);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> value_num(0, 5);

  for (int round = 0; round < 300; ++round) {
    ata::TransitionFormula tf;
    int nd = n_disjuncts(rng);
    for (int i = 0; i < nd; ++i) {
      ata::Disjunct d;
      d.range.lo = bound(rng);
      d.range.lo_strict = coin(rng);
      if (coin(rng)) {
        d.range.hi_inf = false;
        d.range.hi = d.range.lo + bound(rng);
        d.range.hi_strict = coin(rng);
      }
      int nl = n_locs(rng);
      for (int j = 0; j < nl; ++j)
        d.locs.insert(ata::LocRef{loc(rng), coin(rng)});
      tf.push_back(std::move(d));
    }
    tf = ata::normalize(std::move(tf));
    Rational v(value_num(rng), 2);

    auto models = ata::minimal_models(tf, v);
    for (const auto& m : models) {
      REQUIRE(is_model(tf, v, m));
      // Every proper subset must fail (models here have at most 6 states;
      // dropping single elements suffices because satisfaction is monotone).
      for (const auto& s : m) {
        ata::Configuration smaller = m;
        smaller.erase(s);
        REQUIRE_FALSE(is_model(tf, v, smaller));
      }
    }
    // Completeness: every satisfied disjunct's full instantiation contains
    // one of the returned models.
    for (const auto& d : tf) {
      if (!d.range.contains(v)) continue;
      ata::Configuration inst;
      for (const auto& lr : d.locs)
        inst.insert({lr.loc, lr.reset ? Rational(0) : v});
      bool contains_minimal = false;
      for (const auto& m : models)
        contains_minimal =
            contains_minimal ||
            std::includes(inst.begin(), inst.end(), m.begin(), m.end());
      REQUIRE(contains_minimal);
    }
  }
}

TEST_CASE("flow advances every clock uniformly", "[ata]") {
  ata::Configuration g{{0, Rational(0)}};
  CHECK(ata::flow_step(g, Rational(1, 2)) ==
        ata::Configuration{{0, Rational(1, 2)}});
  CHECK(ata::flow_step({}, Rational(7)) == ata::Configuration{});
  CHECK(ata::flow_step(g, Rational(0)) == g);

  ata::Configuration two{{0, Rational(0)}, {1, Rational(1, 3)}};
  CHECK(ata::flow_step(two, Rational(1)) ==
        ata::Configuration{{0, Rational(1)}, {1, Rational(4, 3)}});
}

TEST_CASE("edge step takes one minimal model per member", "[ata]") {
  auto a = ata::build_ata(phi_bad());

  auto fired = ata::edge_step(a, {{0, Rational(1, 2)}}, {grasping});
  REQUIRE(fired.size() == 1);
  CHECK(fired.count(ata::Configuration{}) == 1);

  auto kept = ata::edge_step(a, {{0, Rational(0)}}, {});
  REQUIRE(kept.size() == 1);
  CHECK(kept.count(ata::Configuration{{0, Rational(0)}}) == 1);

  auto from_empty = ata::edge_step(a, {}, {grasping});
  REQUIRE(from_empty.size() == 1);
  CHECK(from_empty.count(ata::Configuration{}) == 1);

  // A member with no satisfiable transition kills every combination.
  auto atomic = ata::build_ata(mtl::f_atom(0));
  CHECK(ata::edge_step(atomic, {{0, Rational(0)}}, {}).empty());
}

TEST_CASE("edge successors of a disjoint union are pairwise unions",
          "[ata]") {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> value_num(0, 5);
  std::bernoulli_distribution coin(0.5);

  for (int round = 0; round < 120; ++round) {
    auto f = rnd::random_formula(rng, 3, 2);
    Rational s(formula_scale(f));
    auto a = ata::build_ata(mtl::scale_formula(f, s));

    ata::Configuration g1, g2;
    std::uniform_int_distribution<std::uint32_t> loc(
        0, static_cast<std::uint32_t>(a.locations.size() - 1));
    for (int i = 0; i < 4; ++i) {
      ata::State st{loc(rng), Rational(value_num(rng), 2)};
      if (g2.count(st)) continue;
      if (coin(rng) && !g2.count(st)) {
        if (!g1.count(st)) g2.insert(st);
      } else if (!g2.count(st)) {
        g1.insert(st);
      }
    }
    for (const auto& st : g1) g2.erase(st);

    std::set<AtomId> symbol;
    for (AtomId p = 0; p < 2; ++p)
      if (coin(rng)) symbol.insert(p);

    ata::Configuration whole = g1;
    whole.insert(g2.begin(), g2.end());
    auto lhs = ata::edge_step(a, whole, symbol);

    ata::ConfigurationSet rhs;
    for (const auto& u1 : ata::edge_step(a, g1, symbol))
      for (const auto& u2 : ata::edge_step(a, g2, symbol)) {
        ata::Configuration u = u1;
        u.insert(u2.begin(), u2.end());
        rhs.insert(std::move(u));
      }
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("acceptance on the grasp words", "[ata]") {
  auto f = phi_bad();
  auto a = ata::build_ata(f);

  mtl::TimedWord bad{letter({}, Rational(0)),
                     letter({grasping}, Rational(1, 2))};
  CHECK(ata::accepts(a, bad));
  CHECK(mtl::check(bad, f));

  mtl::TimedWord late{letter({}, Rational(0)),
                      letter({grasping}, Rational(3, 2))};
  CHECK_FALSE(ata::accepts(a, late));
  CHECK_FALSE(mtl::check(late, f));

  mtl::TimedWord masked{letter({}, Rational(0)),
                        letter({cam_on, grasping}, Rational(1, 2))};
  CHECK_FALSE(ata::accepts(a, masked));
  CHECK_FALSE(mtl::check(masked, f));

  // A single letter leaves the obligation pending in a non-accepting
  // location.
  mtl::TimedWord single{letter({}, Rational(0))};
  CHECK_FALSE(ata::accepts(a, single));
  CHECK_FALSE(mtl::check(single, f));

  CHECK_FALSE(ata::accepts(a, {}));
}

TEST_CASE("unconstrained until needs only a second position", "[ata]") {
  auto f = mtl::f_until(ast::Interval{}, mtl::f_true(), mtl::f_true());
  auto a = ata::build_ata(f);
  mtl::TimedWord one{letter({}, Rational(0))};
  mtl::TimedWord two{letter({}, Rational(0)), letter({}, Rational(5))};
  mtl::TimedWord three{letter({0}, Rational(0)), letter({}, Rational(1)),
                       letter({1}, Rational(9))};
  CHECK_FALSE(ata::accepts(a, one));
  CHECK(ata::accepts(a, two));
  CHECK(ata::accepts(a, three));
}

TEST_CASE("acceptance agrees with the direct checker", "[ata]") {
  std::mt19937_64 rng(99173);
  for (int round = 0; round < 400; ++round) {
    auto f = rnd::random_formula(rng, 3, 2);
    Rational s(formula_scale(f));
    auto scaled = mtl::scale_formula(f, s);
    auto a = ata::build_ata(scaled);
    auto word = scale_word(rnd::random_word(rng, 5, 2), s);
    bool via_automaton = ata::accepts(a, word);
    bool via_checker = mtl::check(word, scaled);
    REQUIRE(via_automaton == via_checker);
  }
}
