// Command-line front end: synthesize a controller from a timed program and
// an undesired-behavior formula, check a concrete trace against the formula,
// replay a controller file through seeded simulations, run the brute-force
// grid solver, or dump the compiled automaton.
//
// Exit codes: 0 success / controllable / safe; 1 uncontrollable or
// violations found; 2 input errors; 3 indeterminate oracle verdict or an
// internal checker disagreement.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tgs/ata.hpp"
#include "tgs/basics.hpp"
#include "tgs/controller_io.hpp"
#include "tgs/dsl.hpp"
#include "tgs/game.hpp"
#include "tgs/ground.hpp"
#include "tgs/mtl.hpp"
#include "tgs/oracle.hpp"
#include "tgs/program.hpp"
#include "tgs/region.hpp"
#include "tgs/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUncontrollable = 1;
constexpr int kExitInputError = 2;
constexpr int kExitIndeterminate = 3;

struct Instance {
  tgs::ground::GroundTheory theory;
  tgs::mtl::FormulaPtr bad;
  tgs::prog::NodePtr program;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good())
    throw std::invalid_argument("cannot read file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance load_instance(const std::string& path, std::size_t max_atoms) {
  auto spec = tgs::dsl::parse_spec(read_file(path), path);
  auto [theory, bad] = tgs::ground::ground_theory(spec, max_atoms);
  auto program = tgs::prog::ground_program(spec.program, theory);
  return {std::move(theory), std::move(bad), std::move(program)};
}

// Trace files carry one timed action per line, "t: action(args)", with
// times in the theory's original (unscaled) units. Parsing is done by the
// library; this adapter resolves each action term to a ground action.
std::vector<std::pair<tgs::Rational, tgs::ActionId>> parse_trace(
    const std::string& text, const std::string& filename,
    const tgs::ground::GroundTheory& theory) {
  std::vector<std::pair<tgs::Rational, tgs::ActionId>> trace;
  for (const auto& step : tgs::dsl::parse_trace(text, filename)) {
    std::string name = step.action.name;
    if (!step.action.args.empty()) {
      name += "(";
      for (std::size_t i = 0; i < step.action.args.size(); ++i) {
        if (i) name += ",";
        name += step.action.args[i].name;
      }
      name += ")";
    }
    auto it = theory.action_ids.find(name);
    if (it == theory.action_ids.end())
      throw std::invalid_argument(filename + ": unknown action '" + name +
                                  "'");
    trace.emplace_back(step.time * theory.scale, it->second);
  }
  return trace;
}

std::string in_original_units(const tgs::Rational& scaled,
                              const tgs::ground::GroundTheory& theory) {
  return tgs::to_string(scaled / theory.scale);
}

void print_stats(const tgs::game::Stats& stats) {
  std::cerr << "nodes_expanded=" << stats.nodes_expanded << "\n"
            << "nodes_pruned=" << stats.nodes_pruned << "\n"
            << "max_depth=" << stats.max_depth << "\n"
            << "wall_time=" << stats.wall_time << "\n";
}

void print_symbolic_witness(const tgs::quotient::QuotientState& state,
                            const tgs::ground::GroundTheory& theory,
                            bool deadlock) {
  std::cout << "witness:\n";
  for (const auto& sym : state.witness) {
    std::cout << "  " << theory.actions.at(sym.action).name << " ["
              << tgs::ctrl_io::guard_text(sym.guard, theory) << "]";
    if (!sym.resets.empty()) {
      std::cout << " resets {";
      bool first = true;
      for (tgs::ClockId c : sym.resets) {
        if (!first) std::cout << ", ";
        first = false;
        std::cout << theory.clock_names.at(c);
      }
      std::cout << "}";
    }
    std::cout << "\n";
  }
  if (deadlock)
    std::cout << "  (deadlock: no admissible continuation, program not "
                 "final)\n";
}

int cmd_synthesize(const std::string& file, const std::string& out_json,
                   const std::string& out_dot, const std::string& label_rule,
                   const std::string& order, std::size_t node_budget,
                   std::size_t max_atoms) {
  Instance inst = load_instance(file, max_atoms);
  auto a = tgs::ata::build_ata(inst.bad);

  tgs::game::Options opt;
  opt.universal = label_rule == "universal";
  opt.smyth = order == "smyth";
  opt.node_budget = node_budget;
  auto res = tgs::game::solve(inst.theory, inst.program, a, opt);
  print_stats(res.stats);

  if (!res.controllable) {
    std::cout << "UNCONTROLLABLE\n";
    // Prefer a node where the bad behavior is realized; fall back to a
    // dead end (non-final node with no admissible continuation).
    const tgs::game::GameNode* bad_node = nullptr;
    const tgs::game::GameNode* dead_node = nullptr;
    for (const auto& node : res.nodes) {
      if (!bad_node && tgs::quotient::is_bad(node.state, a)) bad_node = &node;
      if (!dead_node && node.label == tgs::game::Label::Bad &&
          node.children.empty() &&
          !tgs::quotient::is_final_node(node.state) &&
          !tgs::quotient::is_bad(node.state, a))
        dead_node = &node;
    }
    if (bad_node)
      print_symbolic_witness(bad_node->state, inst.theory, false);
    else if (dead_node)
      print_symbolic_witness(dead_node->state, inst.theory, true);
    return kExitUncontrollable;
  }

  auto ctrl = tgs::game::extract_controller(inst.theory, res);
  tgs::game::validate_controller(inst.theory, a, ctrl);

  std::ofstream json_out(out_json);
  if (!json_out.good())
    throw std::invalid_argument("cannot write '" + out_json + "'");
  json_out << tgs::ctrl_io::controller_json(ctrl, inst.theory).dump(2)
           << "\n";
  std::ofstream dot_out(out_dot);
  if (!dot_out.good())
    throw std::invalid_argument("cannot write '" + out_dot + "'");
  dot_out << tgs::ctrl_io::controller_dot(ctrl, inst.theory);

  std::cout << "CONTROLLABLE\n";
  std::cout << "controller: " << ctrl.nodes.size() << " nodes -> " << out_json
            << ", " << out_dot << "\n";
  return kExitOk;
}

int cmd_check(const std::string& file, const std::string& trace_file,
              std::size_t max_atoms) {
  Instance inst = load_instance(file, max_atoms);
  auto trace = parse_trace(read_file(trace_file), inst.theory);

  const tgs::mtl::TimedWord word = tgs::mtl::fluent_trace(inst.theory, trace);
  const bool formula_says = tgs::mtl::check(word, inst.bad);
  const auto a = tgs::ata::build_ata(inst.bad);
  const bool automaton_says = tgs::ata::accepts(a, word);

  std::cout << (formula_says ? "SAT" : "UNSAT") << "\n";
  if (formula_says != automaton_says) {
    std::cerr << "internal error: formula checker says "
              << (formula_says ? "SAT" : "UNSAT")
              << " but the automaton says "
              << (automaton_says ? "SAT" : "UNSAT") << "\n";
    return kExitIndeterminate;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& file, const std::string& controller_file,
                 int plays, unsigned seed, int max_steps,
                 std::size_t max_atoms) {
  Instance inst = load_instance(file, max_atoms);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(controller_file));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("controller file is not valid JSON: " +
                                std::string(e.what()));
  }
  auto ctrl = tgs::ctrl_io::load_controller(doc, inst.theory);

  int violations = 0;
  std::vector<std::pair<tgs::Rational, tgs::ActionId>> first_violation;
  bool dead_end = false;
  for (int i = 0; i < plays; ++i) {
    std::mt19937_64 rng(seed + static_cast<unsigned>(i));
    tgs::game::PlayTrace play;
    try {
      play = tgs::game::simulate_play(inst.theory, ctrl, rng, max_steps);
    } catch (const std::logic_error&) {
      ++violations;
      dead_end = true;
      continue;
    }
    for (std::size_t len : play.stop_points) {
      std::vector<std::pair<tgs::Rational, tgs::ActionId>> prefix(
          play.trace.begin(),
          play.trace.begin() + static_cast<std::ptrdiff_t>(len));
      if (!tgs::mtl::check(tgs::mtl::fluent_trace(inst.theory, prefix),
                           inst.bad))
        continue;
      ++violations;
      if (first_violation.empty() && !prefix.empty())
        first_violation = prefix;
      break;
    }
  }

  std::cout << "plays=" << plays << " violations=" << violations << "\n";
  if (dead_end)
    std::cout << "note: some play reached a non-final node with no "
                 "admissible move\n";
  if (!first_violation.empty()) {
    std::cout << "violating trace:\n";
    for (const auto& [t, action] : first_violation)
      std::cout << "  " << in_original_units(t, inst.theory) << ": "
                << inst.theory.actions.at(action).name << "\n";
  }
  return violations == 0 ? kExitOk : kExitUncontrollable;
}

int cmd_oracle(const std::string& file, int depth, std::size_t max_atoms) {
  Instance inst = load_instance(file, max_atoms);
  tgs::oracle::Config cfg;
  cfg.depth = depth;
  auto res = tgs::oracle::brute_solve(inst.theory, inst.program, inst.bad,
                                      cfg);
  std::cout << tgs::oracle::to_string(res.verdict) << "\n";
  if (res.verdict == tgs::oracle::Verdict::Uncontrollable &&
      !res.witness.empty()) {
    std::cout << "witness:\n";
    for (const auto& [t, action] : res.witness)
      std::cout << "  " << in_original_units(t, inst.theory) << ": "
                << inst.theory.actions.at(action).name << "\n";
  }
  switch (res.verdict) {
    case tgs::oracle::Verdict::Controllable: return kExitOk;
    case tgs::oracle::Verdict::Uncontrollable: return kExitUncontrollable;
    case tgs::oracle::Verdict::Indeterminate: return kExitIndeterminate;
  }
  return kExitIndeterminate;
}

void collect_atoms(const tgs::mtl::FormulaPtr& f,
                   std::set<tgs::AtomId>& out) {
  if (f->kind == tgs::mtl::Kind::Atom) out.insert(f->atom);
  for (const auto& child : f->children) collect_atoms(child, out);
}

int cmd_dump_ata(const std::string& file, std::size_t max_atoms) {
  Instance inst = load_instance(file, max_atoms);
  auto a = tgs::ata::build_ata(inst.bad);

  std::cout << "locations:\n";
  for (std::size_t l = 0; l < a.locations.size(); ++l) {
    std::cout << "  " << l << ": "
              << tgs::ata::to_string(a.locations[l], inst.theory.atom_names);
    if (l == 0) std::cout << "  (initial)";
    if (a.accepting[l]) std::cout << "  (accepting)";
    std::cout << "\n";
  }

  std::set<tgs::AtomId> atoms;
  collect_atoms(inst.bad, atoms);
  std::vector<std::set<tgs::AtomId>> symbols{{}};
  for (tgs::AtomId atom : atoms) {
    const std::size_t n = symbols.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto with = symbols[i];
      with.insert(atom);
      symbols.push_back(std::move(with));
    }
  }
  std::sort(symbols.begin(), symbols.end(),
            [](const auto& x, const auto& y) {
              if (x.size() != y.size()) return x.size() < y.size();
              return x < y;
            });

  auto symbol_text = [&](const std::set<tgs::AtomId>& symbol) {
    std::string out = "{";
    bool first = true;
    for (tgs::AtomId atom : symbol) {
      if (!first) out += ", ";
      first = false;
      out += inst.theory.atom_names.at(atom);
    }
    return out + "}";
  };

  std::cout << "initial transitions:\n";
  for (const auto& symbol : symbols)
    std::cout << "  delta_0(" << symbol_text(symbol) << ") = "
              << tgs::ata::to_string(tgs::ata::initial_delta(a, symbol), a,
                                     inst.theory.atom_names)
              << "\n";
  std::cout << "transitions:\n";
  for (std::size_t l = 0; l < a.locations.size(); ++l)
    for (const auto& symbol : symbols)
      std::cout << "  delta(" << l << ", " << symbol_text(symbol) << ") = "
                << tgs::ata::to_string(
                       tgs::ata::delta(a, static_cast<tgs::LocationId>(l),
                                       symbol),
                       a, inst.theory.atom_names)
                << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Synthesizes controllers for timed programs against undesired-behavior "
      "formulas, and provides checking, simulation, and diagnostic tools."};
  app.require_subcommand(1);

  std::string file, trace_file, controller_file;
  std::string out_json = "controller.json", out_dot = "controller.dot";
  std::string label_rule = "partition", order = "hoare";
  std::size_t node_budget = 200000, max_atoms = 10000;
  int plays = 100, max_steps = 64, depth = 8;
  unsigned seed = 0;

  auto* synth = app.add_subcommand(
      "synthesize", "Decide controllability and extract a strategy");
  synth->add_option("file", file, "input .tgs file")->required();
  synth->add_option("--out-json", out_json, "controller JSON output path");
  synth->add_option("--out-dot", out_dot, "controller DOT output path");
  synth->add_option("--label-rule", label_rule,
                    "labeling rule: partition | universal")
      ->check(CLI::IsMember({"partition", "universal"}));
  synth->add_option("--order", order, "powerset order: hoare | smyth")
      ->check(CLI::IsMember({"hoare", "smyth"}));
  synth->add_option("--node-budget", node_budget,
                    "abort after this many game nodes");
  synth->add_option("--max-atoms", max_atoms,
                    "grounding size limit (atoms)");

  auto* check = app.add_subcommand(
      "check", "Check a timed action trace against the formula");
  check->add_option("file", file, "input .tgs file")->required();
  check->add_option("trace", trace_file,
                    "trace file: one 't: action(args)' per line")
      ->required();
  check->add_option("--max-atoms", max_atoms, "grounding size limit (atoms)");

  auto* sim = app.add_subcommand(
      "simulate", "Replay a controller file through seeded plays");
  sim->add_option("file", file, "input .tgs file")->required();
  sim->add_option("controller", controller_file, "controller JSON file")
      ->required();
  sim->add_option("--plays", plays, "number of plays");
  sim->add_option("--seed", seed, "master seed; play i uses seed + i");
  sim->add_option("--max-steps", max_steps, "maximum actions per play");
  sim->add_option("--max-atoms", max_atoms, "grounding size limit (atoms)");

  auto* orc = app.add_subcommand(
      "oracle", "Run the brute-force grid solver (small instances only)");
  orc->add_option("file", file, "input .tgs file")->required();
  orc->add_option("--depth", depth, "action depth bound");
  orc->add_option("--max-atoms", max_atoms, "grounding size limit (atoms)");

  auto* dump = app.add_subcommand(
      "dump-ata", "Print the compiled automaton of the formula");
  dump->add_option("file", file, "input .tgs file")->required();
  dump->add_option("--max-atoms", max_atoms, "grounding size limit (atoms)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synthesize(file, out_json, out_dot, label_rule, order,
                            node_budget, max_atoms);
    if (check->parsed()) return cmd_check(file, trace_file, max_atoms);
    if (sim->parsed())
      return cmd_simulate(file, controller_file, plays, seed, max_steps,
                          max_atoms);
    if (orc->parsed()) return cmd_oracle(file, depth, max_atoms);
    if (dump->parsed()) return cmd_dump_ata(file, max_atoms);
  } catch (const tgs::game::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
