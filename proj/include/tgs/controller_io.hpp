#pragma once

// Stable file formats for synthesized strategies: a JSON document carrying
// the full graph (fluents, pretty-printed remainder, selected moves with
// guards and resets) and a Graphviz rendering of the same graph. The loader
// rebuilds a playable strategy from the JSON and checks its structure:
// referential integrity, known actions/clocks, consistent ownership, and
// non-blocking selections outside final nodes.

#include <json.hpp>

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgs/basics.hpp"
#include "tgs/game.hpp"
#include "tgs/ground.hpp"
#include "tgs/program.hpp"

namespace tgs::ctrl_io {

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

inline std::string guard_text(const ground::GuardExpr& g,
                              const ground::GroundTheory& theory) {
  if (g.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += " & ";
    out += theory.clock_names.at(g[i].clock);
    out += ' ';
    out += cmp_text(g[i].op);
    out += ' ';
    out += std::to_string(g[i].bound);
  }
  return out;
}

inline ground::GuardExpr parse_guard_text(const std::string& text,
                                          const ground::GroundTheory& theory) {
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  ground::GuardExpr g;
  std::string rest = text;
  std::vector<std::string> parts;
  std::size_t at = 0;
  while ((at = rest.find('&')) != std::string::npos) {
    parts.push_back(trim(rest.substr(0, at)));
    rest = rest.substr(at + 1);
  }
  parts.push_back(trim(rest));
  if (parts.size() == 1 && (parts[0] == "true" || parts[0].empty())) return g;
  for (const auto& part : parts) {
    std::istringstream in(part);
    std::string clock, op;
    long long bound = 0;
    if (!(in >> clock >> op >> bound))
      throw std::invalid_argument("malformed guard atom: '" + part + "'");
    ground::GuardAtom atom;
    bool known = false;
    for (std::size_t i = 0; i < theory.clock_names.size(); ++i) {
      if (theory.clock_names[i] != clock) continue;
      atom.clock = static_cast<ClockId>(i);
      known = true;
    }
    if (!known)
      throw std::invalid_argument("guard names unknown clock '" + clock + "'");
    if (op == "<") atom.op = CmpOp::Lt;
    else if (op == "<=") atom.op = CmpOp::Le;
    else if (op == "==") atom.op = CmpOp::Eq;
    else if (op == ">=") atom.op = CmpOp::Ge;
    else if (op == ">") atom.op = CmpOp::Gt;
    else throw std::invalid_argument("unknown comparison '" + op + "'");
    atom.bound = bound;
    g.push_back(atom);
  }
  return g;
}

inline nlohmann::json controller_json(const game::Controller& ctrl,
                                      const ground::GroundTheory& theory) {
  nlohmann::json doc;
  doc["verdict"] = "CONTROLLABLE";
  doc["initial"] = 0;
  doc["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ctrl.nodes.size(); ++i) {
    const auto& node = ctrl.nodes[i];
    nlohmann::json jn;
    jn["id"] = i;
    jn["fluents"] = nlohmann::json::array();
    for (std::size_t f = 0; f < node.state.fluents.size(); ++f)
      if (node.state.fluents[f])
        jn["fluents"].push_back(theory.atom_names.at(f));
    jn["program"] = node.state.rho ? prog::to_string(node.state.rho, theory)
                                   : std::string("nil");
    jn["final"] = node.final;
    jn["selected"] = nlohmann::json::array();
    for (const auto& edge : node.selected) {
      nlohmann::json je;
      je["action"] = theory.actions.at(edge.sym.action).name;
      je["owner"] = edge.owner == Owner::Environment ? "environment"
                                                     : "controller";
      je["guard"] = guard_text(edge.sym.guard, theory);
      je["resets"] = nlohmann::json::array();
      for (ClockId c : edge.sym.resets)
        je["resets"].push_back(theory.clock_names.at(c));
      je["target"] = edge.target;
      jn["selected"].push_back(std::move(je));
    }
    doc["nodes"].push_back(std::move(jn));
  }
  return doc;
}

// Rebuilds a playable strategy graph from the JSON document. The discrete
// state behind each node (fluents, remainder) is not reconstructed — plays
// need only finality, guards, resets, and targets — but the structure is
// checked: ids are dense, the initial node is node 0, targets stay inside
// the graph, actions/clocks are known and owners match the theory, and only
// final nodes may have an empty selection.
inline game::Controller load_controller(const nlohmann::json& doc,
                                        const ground::GroundTheory& theory) {
  game::Controller ctrl;
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw std::invalid_argument("controller document has no nodes array");
  if (doc.value("initial", 0) != 0)
    throw std::invalid_argument("controller initial node must be 0");
  const auto& nodes = doc["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& jn = nodes[i];
    if (jn.value("id", -1) != static_cast<long long>(i))
      throw std::invalid_argument("controller node ids must be dense 0..n-1");
    game::Controller::Node node;
    node.final = jn.value("final", false);
    for (const auto& je : jn.value("selected", nlohmann::json::array())) {
      game::Controller::Edge edge;
      const std::string action = je.value("action", "");
      auto it = theory.action_ids.find(action);
      if (it == theory.action_ids.end())
        throw std::invalid_argument("controller selects unknown action '" +
                                    action + "'");
      edge.sym.action = it->second;
      const std::string owner = je.value("owner", "");
      edge.owner = owner == "environment" ? Owner::Environment
                                          : Owner::Controller;
      if (edge.owner != theory.actions.at(edge.sym.action).owner)
        throw std::invalid_argument("controller owner tag for '" + action +
                                    "' contradicts the theory");
      edge.sym.guard = parse_guard_text(je.value("guard", "true"), theory);
      for (const auto& jc : je.value("resets", nlohmann::json::array())) {
        const std::string clock = jc.get<std::string>();
        bool known = false;
        for (std::size_t c = 0; c < theory.clock_names.size(); ++c) {
          if (theory.clock_names[c] != clock) continue;
          edge.sym.resets.insert(static_cast<ClockId>(c));
          known = true;
        }
        if (!known)
          throw std::invalid_argument("controller resets unknown clock '" +
                                      clock + "'");
      }
      if (!je.contains("target") || !je["target"].is_number_unsigned())
        throw std::invalid_argument("controller edge has no target");
      edge.target = je["target"].get<std::size_t>();
      if (edge.target >= nodes.size())
        throw std::invalid_argument("controller edge leaves the graph");
      node.selected.push_back(std::move(edge));
    }
    if (node.selected.empty() && !node.final)
      throw std::invalid_argument(
          "non-final controller node has an empty selection");
    ctrl.nodes.push_back(std::move(node));
  }
  if (ctrl.nodes.empty())
    throw std::invalid_argument("controller document has no nodes");
  return ctrl;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string controller_dot(const game::Controller& ctrl,
                                  const ground::GroundTheory& theory) {
  std::ostringstream out;
  out << "digraph controller {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < ctrl.nodes.size(); ++i) {
    const auto& node = ctrl.nodes[i];
    std::string fluents;
    for (std::size_t f = 0; f < node.state.fluents.size(); ++f) {
      if (!node.state.fluents[f]) continue;
      if (!fluents.empty()) fluents += ", ";
      fluents += theory.atom_names.at(f);
    }
    out << "  n" << i << " [label=\"" << i << ": {" << dot_escape(fluents)
        << "}\\n"
        << dot_escape(node.state.rho ? prog::to_string(node.state.rho, theory)
                                     : std::string("nil"))
        << "\"";
    if (node.final) out << ", peripheries=2";
    if (i == 0) out << ", style=bold";
    out << "];\n";
  }
  for (std::size_t i = 0; i < ctrl.nodes.size(); ++i) {
    for (const auto& edge : ctrl.nodes[i].selected) {
      out << "  n" << i << " -> n" << edge.target << " [label=\""
          << dot_escape(theory.actions.at(edge.sym.action).name);
      if (!edge.sym.guard.empty())
        out << " [" << dot_escape(guard_text(edge.sym.guard, theory)) << "]";
      if (!edge.sym.resets.empty()) {
        out << " {";
        bool first = true;
        for (ClockId c : edge.sym.resets) {
          if (!first) out << ", ";
          first = false;
          out << dot_escape(theory.clock_names.at(c));
        }
        out << "}";
      }
      out << "\"";
      if (edge.owner == Owner::Environment) out << ", style=dashed";
      out << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace tgs::ctrl_io
