// The safety game: the domination order on region words and nodes, solve
// verdicts pinned on the fixture domains and cross-checked against the
// brute-force grid solver over the whole instance suite, pruning invariants,
// and extracted strategies validated structurally and by seeded plays.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "tgs/ata.hpp"
#include "tgs/dsl.hpp"
#include "tgs/game.hpp"
#include "tgs/ground.hpp"
#include "tgs/mtl.hpp"
#include "tgs/oracle.hpp"
#include "tgs/program.hpp"
#include "tgs/region.hpp"

using namespace tgs;

namespace {

struct Compiled {
  ground::GroundTheory theory;
  mtl::FormulaPtr bad;
  prog::NodePtr program;
  ata::Ata a;
};

Compiled compile(const std::string& text, const std::string& name = "test.tgs") {
  auto spec = dsl::parse_spec(text, name);
  auto [theory, bad] = ground::ground_theory(spec);
  auto program = prog::ground_program(spec.program, theory);
  auto a = ata::build_ata(bad);
  return {std::move(theory), std::move(bad), std::move(program), std::move(a)};
}

std::string read_instance(const std::string& filename) {
  std::ifstream in(std::filesystem::path(TGS_INSTANCE_DIR) / filename);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

region::Letter clk(ClockId id, region::RegionIndex r) {
  return {true, id, r};
}

region::Letter loc(LocationId id, region::RegionIndex r) {
  return {false, id, r};
}

region::CanonicalWord word_of(long long k,
                              std::vector<region::LetterSet> classes) {
  region::CanonicalWord w;
  w.k = k;
  w.classes = std::move(classes);
  return w;
}

// Simulates `plays` seeded controller runs and checks that every point where
// the play could have terminated carries a trace that does not satisfy the
// undesired-behavior formula.
void check_plays_safe(const Compiled& c, const game::Controller& ctrl,
                      int plays, unsigned seed) {
  for (int i = 0; i < plays; ++i) {
    std::mt19937_64 rng(seed + static_cast<unsigned>(i));
    game::PlayTrace play = game::simulate_play(c.theory, ctrl, rng);
    for (std::size_t len : play.stop_points) {
      std::vector<std::pair<Rational, ActionId>> prefix(
          play.trace.begin(),
          play.trace.begin() + static_cast<std::ptrdiff_t>(len));
      REQUIRE_FALSE(mtl::check(mtl::fluent_trace(c.theory, prefix), c.bad));
    }
  }
}

}  // namespace

TEST_CASE("word domination embeds classes monotonically", "[game]") {
  auto A = loc(0, 1);
  auto B = loc(1, 1);
  auto C = loc(2, 1);

  REQUIRE(game::word_leq(word_of(2, {{A}, {B}}),
                         word_of(2, {{A}, {A, B}, {C}})));
  REQUIRE(game::word_leq(word_of(2, {{A}}), word_of(2, {{A, B}})));
  REQUIRE(game::word_leq(word_of(2, {}), word_of(2, {{A}})));

  // Classes must not merge, shrink, or swap their order.
  REQUIRE_FALSE(game::word_leq(word_of(2, {{A, B}}), word_of(2, {{A}})));
  REQUIRE_FALSE(game::word_leq(word_of(2, {{B}, {A}}),
                               word_of(2, {{A}, {B}})));
  REQUIRE_FALSE(game::word_leq(word_of(2, {{A}, {A}}), word_of(2, {{A}})));

  auto w = word_of(1, {{clk(0, 0), A}, {B}});
  REQUIRE(game::word_leq(w, w));
}

TEST_CASE("set domination lifts word domination over word sets", "[game]") {
  auto A = loc(0, 1);
  auto B = loc(1, 1);
  auto C = loc(2, 1);
  auto wa = word_of(2, {{A}});
  auto wb = word_of(2, {{B}});
  auto wc = word_of(2, {{C}});
  auto wab = word_of(2, {{A}, {B}});

  const bool hoare = false, smyth = true;
  REQUIRE(game::set_leq({}, {wa}, hoare));
  REQUIRE(game::set_leq({wa}, {wa, wc}, hoare));
  REQUIRE(game::set_leq({wa, wb}, {wab}, hoare));
  REQUIRE_FALSE(game::set_leq({wa, wc}, {wab}, hoare));

  // The other direction quantifies over the later set instead.
  REQUIRE(game::set_leq({wa, wc}, {wab}, smyth));
  REQUIRE_FALSE(game::set_leq({wa}, {wa, wc}, smyth));
}

TEST_CASE("node domination requires equal fluents, remainder, and liveness",
          "[game]") {
  auto camera = compile(fixtures::camera_text());
  auto grasp = compile(fixtures::grasp_only_text());

  auto st = quotient::initial_node(camera.theory, camera.program, camera.a);
  REQUIRE(game::leq_d(st, st, false));
  REQUIRE(game::leq_d(st, st, true));

  // A word enlarged by one letter dominates, so the set grows upward.
  auto bigger = st;
  auto w2 = *st.words.begin();
  REQUIRE_FALSE(w2.classes.empty());
  w2.classes[0].insert(loc(0, 1));
  bigger.words.insert(w2);
  REQUIRE(game::leq_d(st, bigger, false));
  REQUIRE_FALSE(game::leq_d(bigger, st, false));

  auto other_fluents = st;
  other_fluents.fluents[0] = !other_fluents.fluents[0];
  REQUIRE_FALSE(game::leq_d(st, other_fluents, false));

  auto other_rho =
      quotient::initial_node(grasp.theory, grasp.program, grasp.a);
  REQUIRE_FALSE(game::leq_d(st, other_rho, false));

  auto dead = st;
  dead.spec_dead = true;
  REQUIRE_FALSE(game::leq_d(st, dead, false));
}

TEST_CASE("the camera instance synthesizes the boot-first strategy",
          "[game]") {
  auto c = compile(fixtures::camera_text());
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE(res.controllable);
  REQUIRE(res.stats.nodes_expanded > 0);
  REQUIRE(res.stats.max_depth == 4);

  auto ctrl = game::extract_controller(c.theory, res);
  game::validate_controller(c.theory, c.a, ctrl);

  // A single chain: boot, wait out the one-unit guard, grasp, release.
  REQUIRE(ctrl.nodes.size() == 5);
  std::vector<std::string> actions;
  std::size_t at = 0;
  while (!ctrl.nodes[at].selected.empty()) {
    REQUIRE(ctrl.nodes[at].selected.size() == 1);
    const auto& edge = ctrl.nodes[at].selected.front();
    actions.push_back(c.theory.actions.at(edge.sym.action).name);
    at = edge.target;
  }
  REQUIRE(actions == std::vector<std::string>{"start_cam", "end_cam",
                                              "start_grasp(o1,l1)",
                                              "end_grasp(o1,l1)"});
  REQUIRE(ctrl.nodes[at].final);

  // The boot takes exactly one time unit: the second edge carries the
  // equality guard on the camera clock.
  const auto& boot_guard = ctrl.nodes[1].selected.front().sym.guard;
  REQUIRE(boot_guard.size() == 1);
  REQUIRE(boot_guard.front().op == CmpOp::Eq);
  REQUIRE(boot_guard.front().bound == 1);

  // Every seeded play boots before grasping and holds the one-unit boot.
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    auto play = game::simulate_play(c.theory, ctrl, rng);
    REQUIRE(play.trace.size() == 4);
    REQUIRE(play.trace[1].first - play.trace[0].first == Rational(1));
    for (std::size_t len : play.stop_points) {
      std::vector<std::pair<Rational, ActionId>> prefix(
          play.trace.begin(),
          play.trace.begin() + static_cast<std::ptrdiff_t>(len));
      REQUIRE_FALSE(mtl::check(mtl::fluent_trace(c.theory, prefix), c.bad));
    }
  }
}

TEST_CASE("the blind grasp has no controller", "[game]") {
  auto c = compile(fixtures::grasp_only_text());
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE_FALSE(res.controllable);
  REQUIRE_THROWS_AS(game::extract_controller(c.theory, res),
                    std::logic_error);

  // Some reached node witnesses the violation symbolically.
  bool found = false;
  for (const auto& node : res.nodes)
    found = found || quotient::is_bad(node.state, c.a);
  REQUIRE(found);
}

TEST_CASE("the empty program is controllable by stopping", "[game]") {
  auto c = compile(read_instance("nil_program.tgs"), "nil_program.tgs");
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE(res.controllable);
  auto ctrl = game::extract_controller(c.theory, res);
  game::validate_controller(c.theory, c.a, ctrl);
  REQUIRE(ctrl.nodes.size() == 1);
  REQUIRE(ctrl.nodes[0].final);
  REQUIRE(ctrl.nodes[0].selected.empty());
}

TEST_CASE("the boot loop terminates through pruning into a cyclic strategy",
          "[game]") {
  auto c = compile(fixtures::camera_loop_text());
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE(res.controllable);
  REQUIRE(res.stats.nodes_pruned >= 1);

  // Every pruned node is dominated by the recorded strict ancestor.
  std::size_t checked = 0;
  for (std::size_t i = 0; i < res.nodes.size(); ++i) {
    const auto& node = res.nodes[i];
    if (!node.pruned) continue;
    ++checked;
    REQUIRE(node.label == game::Label::Good);
    REQUIRE(node.prune_to >= 0);
    bool is_ancestor = false;
    for (int anc = node.parent; anc != -1; anc = res.nodes[anc].parent)
      is_ancestor = is_ancestor || anc == node.prune_to;
    REQUIRE(is_ancestor);
    REQUIRE(game::leq_d(res.nodes[node.prune_to].state, node.state, false));
  }
  REQUIRE(checked == res.stats.nodes_pruned);

  // The fold produces a cycle: some selected edge points backwards.
  auto ctrl = game::extract_controller(c.theory, res);
  game::validate_controller(c.theory, c.a, ctrl);
  bool back_edge = false;
  for (std::size_t i = 0; i < ctrl.nodes.size(); ++i)
    for (const auto& edge : ctrl.nodes[i].selected)
      back_edge = back_edge || edge.target <= i;
  REQUIRE(back_edge);

  // Plays cycle through reboots without dead ends; with no final node on the
  // cycle they never terminate, which is vacuously safe under the
  // terminating-trace reading.
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    auto play = game::simulate_play(c.theory, ctrl, rng, 40);
    REQUIRE_FALSE(play.stopped);
    REQUIRE(play.trace.size() == 40);
    REQUIRE(play.stop_points.empty());
  }
}

TEST_CASE("an environment move into the violation poisons the node",
          "[game]") {
  auto c = compile(read_instance("env_forced.tgs"), "env_forced.tgs");
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE_FALSE(res.controllable);

  // The root has a good controller child, but the environment child decides.
  REQUIRE(res.nodes[0].children.size() == 2);
  bool env_bad = false, ctrl_good = false;
  for (const auto& edge : res.nodes[0].children) {
    const auto& child = res.nodes[edge.node];
    if (edge.owner == Owner::Environment)
      env_bad = env_bad || child.label == game::Label::Bad;
    else
      ctrl_good = ctrl_good || child.label == game::Label::Good;
  }
  REQUIRE(env_bad);
  REQUIRE(ctrl_good);
}

TEST_CASE("the all-children labeling is stricter than the partition rule",
          "[game]") {
  auto c = compile(read_instance("ctrl_choice.tgs"), "ctrl_choice.tgs");
  auto res = game::solve(c.theory, c.program, c.a);
  REQUIRE(res.controllable);

  game::Options uni;
  uni.universal = true;
  auto res_uni = game::solve(c.theory, c.program, c.a, uni);
  REQUIRE_FALSE(res_uni.controllable);
}

TEST_CASE("solving is deterministic and respects the node budget", "[game]") {
  auto c = compile(fixtures::camera_text());
  auto r1 = game::solve(c.theory, c.program, c.a);
  auto r2 = game::solve(c.theory, c.program, c.a);
  REQUIRE(r1.controllable == r2.controllable);
  REQUIRE(r1.stats.nodes_expanded == r2.stats.nodes_expanded);
  REQUIRE(r1.stats.nodes_pruned == r2.stats.nodes_pruned);
  REQUIRE(r1.stats.max_depth == r2.stats.max_depth);
  REQUIRE(r1.nodes.size() == r2.nodes.size());

  game::Options tiny;
  tiny.node_budget = 3;
  REQUIRE_THROWS_AS(game::solve(c.theory, c.program, c.a, tiny),
                    game::BudgetError);
}

TEST_CASE("verdicts agree with the brute-force solver across the suite under "
          "both orders",
          "[game]") {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(TGS_INSTANCE_DIR))
    if (entry.path().extension() == ".tgs") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 10);

  int definite = 0, controllable = 0, uncontrollable = 0;
  for (const auto& path : files) {
    INFO(path.filename().string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto c = compile(ss.str(), path.filename().string());

    oracle::Config cfg;
    cfg.depth = 8;
    auto truth = oracle::brute_solve(c.theory, c.program, c.bad, cfg);

    auto hoare = game::solve(c.theory, c.program, c.a);
    game::Options sm;
    sm.smyth = true;
    auto smyth = game::solve(c.theory, c.program, c.a, sm);
    REQUIRE(hoare.controllable == smyth.controllable);

    if (truth.verdict == oracle::Verdict::Indeterminate) continue;
    ++definite;
    const bool want = truth.verdict == oracle::Verdict::Controllable;
    REQUIRE(hoare.controllable == want);

    if (want) {
      ++controllable;
      auto ctrl = game::extract_controller(c.theory, hoare);
      game::validate_controller(c.theory, c.a, ctrl);
      check_plays_safe(c, ctrl, 100, 1000 + static_cast<unsigned>(definite));
    } else {
      ++uncontrollable;
    }
  }
  REQUIRE(definite >= 10);
  REQUIRE(controllable >= 3);
  REQUIRE(uncontrollable >= 3);
}
