#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "adsec/errors.hpp"
#include "adsec/ltl.hpp"

namespace adsec {

// UML sequence diagrams, stored as JSON documents with three top-level keys:
// lifelines, messages and fragments. The event atom of a message is
// "<to>.<label>". Alt fragments gate a contiguous message range on a
// condition given either as the index of an earlier message or as a literal
// atom string.

struct Message {
  std::string from, to, label;
  std::optional<std::string> guard;

  friend bool operator==(const Message&, const Message&) = default;
};

struct AltFragment {
  std::variant<std::size_t, std::string> condition;
  std::vector<std::size_t> then_branch;
  std::vector<std::size_t> else_branch;

  friend bool operator==(const AltFragment&, const AltFragment&) = default;
};

struct SequenceDiagram {
  std::vector<std::string> lifelines;
  std::vector<Message> messages;
  std::vector<AltFragment> fragments;

  friend bool operator==(const SequenceDiagram&, const SequenceDiagram&) = default;
};

inline std::string event_atom(const SequenceDiagram& d, std::size_t index) {
  return d.messages.at(index).to + "." + d.messages.at(index).label;
}

namespace detail {

inline void require_key(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
}

inline std::string string_at(const nlohmann::json& j, const char* key, const std::string& where) {
  require_key(j, key, where);
  if (!j[key].is_string()) throw ParseError(where + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

inline std::vector<std::size_t> index_list(const nlohmann::json& j, const char* key,
                                           const std::string& where, std::size_t bound) {
  require_key(j, key, where);
  if (!j[key].is_array()) throw ParseError(where + "." + key + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_unsigned())
      throw ParseError(where + "." + key + ": expected message indices");
    std::size_t i = v.get<std::size_t>();
    if (i >= bound)
      throw ParseError(where + "." + key + ": message index " + std::to_string(i) +
                       " out of range");
    out.push_back(i);
  }
  return out;
}

}  // namespace detail

inline SequenceDiagram parse_diagram(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object()) throw ParseError(origin + ": diagram document must be an object");
  SequenceDiagram d;
  detail::require_key(j, "lifelines", origin);
  if (!j["lifelines"].is_array()) throw ParseError(origin + ".lifelines: expected an array");
  std::set<std::string> names;
  for (const auto& l : j["lifelines"]) {
    if (!l.is_string()) throw ParseError(origin + ".lifelines: expected strings");
    std::string name = l.get<std::string>();
    if (name.empty()) throw ParseError(origin + ".lifelines: empty lifeline name");
    if (!names.insert(name).second)
      throw ParseError(origin + ".lifelines: duplicate lifeline '" + name + "'");
    d.lifelines.push_back(std::move(name));
  }
  detail::require_key(j, "messages", origin);
  if (!j["messages"].is_array()) throw ParseError(origin + ".messages: expected an array");
  std::size_t mi = 0;
  for (const auto& m : j["messages"]) {
    std::string where = origin + ".messages[" + std::to_string(mi++) + "]";
    Message msg;
    msg.from = detail::string_at(m, "from", where);
    msg.to = detail::string_at(m, "to", where);
    msg.label = detail::string_at(m, "label", where);
    if (msg.label.empty()) throw ParseError(where + ".label: empty message label");
    for (const std::string* endpoint : {&msg.from, &msg.to})
      if (!names.count(*endpoint))
        throw ParseError(where + ": unknown lifeline '" + *endpoint + "'");
    if (m.contains("guard")) {
      if (!m["guard"].is_string()) throw ParseError(where + ".guard: expected a string");
      msg.guard = m["guard"].get<std::string>();
    }
    d.messages.push_back(std::move(msg));
  }
  if (j.contains("fragments")) {
    if (!j["fragments"].is_array()) throw ParseError(origin + ".fragments: expected an array");
    std::size_t fi = 0;
    for (const auto& f : j["fragments"]) {
      std::string where = origin + ".fragments[" + std::to_string(fi++) + "]";
      if (detail::string_at(f, "kind", where) != "alt")
        throw ParseError(where + ".kind: only 'alt' fragments are supported");
      AltFragment frag;
      detail::require_key(f, "condition", where);
      if (f["condition"].is_number_unsigned()) {
        std::size_t c = f["condition"].get<std::size_t>();
        if (c >= d.messages.size())
          throw ParseError(where + ".condition: message index out of range");
        frag.condition = c;
      } else if (f["condition"].is_string()) {
        frag.condition = f["condition"].get<std::string>();
      } else {
        throw ParseError(where + ".condition: expected a message index or an atom string");
      }
      frag.then_branch = detail::index_list(f, "then", where, d.messages.size());
      frag.else_branch = detail::index_list(f, "else", where, d.messages.size());
      d.fragments.push_back(std::move(frag));
    }
  }

  // Each fragment's branches must partition a contiguous message range, and
  // ranges of distinct fragments must not overlap.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t k = 0; k < d.fragments.size(); ++k) {
    const AltFragment& frag = d.fragments[k];
    std::string where = origin + ".fragments[" + std::to_string(k) + "]";
    std::set<std::size_t> covered(frag.then_branch.begin(), frag.then_branch.end());
    for (std::size_t i : frag.else_branch)
      if (!covered.insert(i).second)
        throw ParseError(where + ": message " + std::to_string(i) + " is in both branches");
    if (covered.empty()) throw ParseError(where + ": fragment covers no messages");
    std::size_t lo = *covered.begin(), hi = *covered.rbegin();
    if (covered.size() != hi - lo + 1)
      throw ParseError(where + ": branches do not cover a contiguous message range");
    if (const std::size_t* c = std::get_if<std::size_t>(&frag.condition))
      if (*c >= lo) throw ParseError(where + ": condition must reference an earlier message");
    for (auto [plo, phi] : ranges)
      if (lo <= phi && plo <= hi)
        throw ParseError(where + ": fragment ranges overlap");
    ranges.emplace_back(lo, hi);
  }
  return d;
}

inline SequenceDiagram parse_diagram_text(std::string_view text, const std::string& origin) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(origin + ": invalid JSON");
  return parse_diagram(j, origin);
}

inline SequenceDiagram load_diagram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open diagram: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_diagram_text(buf.str(), path.filename().string());
}

// Activity diagrams, the intermediate form between sequence diagrams and
// properties. Actions carry an event atom; decisions carry a condition atom.

struct ActivityDiagram {
  enum class NodeType { initial, final_node, action, decision, fork, join };
  struct Node {
    NodeType type;
    std::string atom;  // action event or decision condition

    friend bool operator==(const Node&, const Node&) = default;
  };
  struct Edge {
    std::size_t from, to;
    std::optional<bool> guard;  // set on edges leaving a decision

    friend bool operator==(const Edge&, const Edge&) = default;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  friend bool operator==(const ActivityDiagram&, const ActivityDiagram&) = default;
};

inline std::optional<std::string> check_activity(const ActivityDiagram& a) {
  std::size_t initials = 0;
  for (const auto& n : a.nodes)
    if (n.type == ActivityDiagram::NodeType::initial) ++initials;
  if (initials != 1) return "activity diagram must have exactly one initial node";
  for (const auto& e : a.edges)
    if (e.from >= a.nodes.size() || e.to >= a.nodes.size()) return "edge endpoint out of range";
  // Reachability from the initial node.
  std::vector<char> seen(a.nodes.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].type == ActivityDiagram::NodeType::initial) {
      stack.push_back(i);
      seen[i] = 1;
    }
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    for (const auto& e : a.edges)
      if (e.from == n && !seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
  }
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].type == ActivityDiagram::NodeType::action && !seen[i])
      return "action '" + a.nodes[i].atom + "' unreachable from the initial node";
  // Every fork's out-degree matches its paired join's in-degree; pairing is
  // positional (forks and joins are created together, in order).
  std::vector<std::size_t> fork_out, join_in;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    std::size_t out = 0, in = 0;
    for (const auto& e : a.edges) {
      if (e.from == i) ++out;
      if (e.to == i) ++in;
    }
    if (a.nodes[i].type == ActivityDiagram::NodeType::fork) fork_out.push_back(out);
    if (a.nodes[i].type == ActivityDiagram::NodeType::join) join_in.push_back(in);
  }
  if (fork_out.size() != join_in.size()) return "unpaired fork/join nodes";
  for (std::size_t i = 0; i < fork_out.size(); ++i)
    if (fork_out[i] != join_in[i]) return "fork out-degree differs from join in-degree";
  return std::nullopt;
}

namespace detail {

struct Dangling {
  std::size_t node;
  std::optional<bool> guard;
};

struct ActivityBuilder {
  ActivityDiagram diagram;
  std::vector<Dangling> frontier;

  std::size_t add_node(ActivityDiagram::NodeType type, std::string atom = "") {
    diagram.nodes.push_back({type, std::move(atom)});
    return diagram.nodes.size() - 1;
  }

  void connect_frontier_to(std::size_t node) {
    for (const Dangling& d : frontier) diagram.edges.push_back({d.node, node, d.guard});
    frontier.clear();
  }
};

}  // namespace detail

// Linear walk over the message sequence:
//   - a plain message becomes an action chained after the current frontier;
//   - two messages emitted by the receiver of the previous one towards two
//     distinct targets become a fork/join block;
//   - an alt fragment or a guarded message becomes a decision with true/false
//     edges; branch tails rejoin at whatever follows.
// Constructs outside these shapes are reported through `warnings` and
// contribute no property later.
inline ActivityDiagram seq_to_activity(const SequenceDiagram& d,
                                       std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  detail::ActivityBuilder b;
  std::size_t initial = b.add_node(ActivityDiagram::NodeType::initial);
  b.frontier.push_back({initial, std::nullopt});

  // Fragment starting at each covered range start.
  std::vector<std::optional<std::size_t>> fragment_at(d.messages.size());
  for (std::size_t k = 0; k < d.fragments.size(); ++k) {
    const AltFragment& f = d.fragments[k];
    std::size_t lo = d.messages.size();
    for (std::size_t i : f.then_branch) lo = std::min(lo, i);
    for (std::size_t i : f.else_branch) lo = std::min(lo, i);
    fragment_at[lo] = k;
  }

  auto atom_of_condition = [&](const AltFragment& f) -> std::string {
    if (const std::size_t* c = std::get_if<std::size_t>(&f.condition)) return event_atom(d, *c);
    return std::get<std::string>(f.condition);
  };

  std::size_t i = 0;
  while (i < d.messages.size()) {
    if (fragment_at[i]) {
      const AltFragment& f = d.fragments[*fragment_at[i]];
      std::size_t dec = b.add_node(ActivityDiagram::NodeType::decision, atom_of_condition(f));
      b.connect_frontier_to(dec);
      std::size_t range_end = i;
      std::vector<detail::Dangling> tails;
      for (bool branch : {true, false}) {
        const auto& indices = branch ? f.then_branch : f.else_branch;
        detail::Dangling prev{dec, branch};
        for (std::size_t m : indices) {
          range_end = std::max(range_end, m);
          std::size_t a = b.add_node(ActivityDiagram::NodeType::action, event_atom(d, m));
          b.diagram.edges.push_back({prev.node, a, prev.guard});
          prev = {a, std::nullopt};
        }
        if (indices.empty())
          warn("alt fragment branch without messages: no property will be emitted for it");
        tails.push_back(prev);
      }
      b.frontier = std::move(tails);
      i = range_end + 1;
      continue;
    }
    const Message& m = d.messages[i];
    if (m.guard) {
      // Guarded message: decision on the guard atom; the false edge skips
      // ahead to whatever follows.
      std::size_t dec = b.add_node(ActivityDiagram::NodeType::decision, *m.guard);
      b.connect_frontier_to(dec);
      std::size_t a = b.add_node(ActivityDiagram::NodeType::action, event_atom(d, i));
      b.diagram.edges.push_back({dec, a, true});
      b.frontier = {{a, std::nullopt}, {dec, false}};
      ++i;
      continue;
    }
    bool fork_shape = i > 0 && i + 1 < d.messages.size() && !fragment_at[i + 1] &&
                      !d.messages[i + 1].guard && !d.messages[i - 1].guard &&
                      d.messages[i].from == d.messages[i - 1].to &&
                      d.messages[i + 1].from == d.messages[i - 1].to &&
                      d.messages[i].to != d.messages[i + 1].to &&
                      b.frontier.size() == 1 &&
                      b.diagram.nodes[b.frontier[0].node].type ==
                          ActivityDiagram::NodeType::action;
    if (fork_shape) {
      std::size_t fork = b.add_node(ActivityDiagram::NodeType::fork);
      b.connect_frontier_to(fork);
      std::size_t a1 = b.add_node(ActivityDiagram::NodeType::action, event_atom(d, i));
      std::size_t a2 = b.add_node(ActivityDiagram::NodeType::action, event_atom(d, i + 1));
      std::size_t join = b.add_node(ActivityDiagram::NodeType::join);
      b.diagram.edges.push_back({fork, a1, std::nullopt});
      b.diagram.edges.push_back({fork, a2, std::nullopt});
      b.diagram.edges.push_back({a1, join, std::nullopt});
      b.diagram.edges.push_back({a2, join, std::nullopt});
      b.frontier = {{join, std::nullopt}};
      i += 2;
      continue;
    }
    std::size_t a = b.add_node(ActivityDiagram::NodeType::action, event_atom(d, i));
    b.connect_frontier_to(a);
    b.frontier = {{a, std::nullopt}};
    ++i;
  }
  std::size_t final_node = b.add_node(ActivityDiagram::NodeType::final_node);
  b.connect_frontier_to(final_node);
  return std::move(b.diagram);
}

// A property together with the transformation rule and diagram location that
// produced it.
struct GeneratedProperty {
  LtlFormula formula;
  std::string rule;    // chain | decision | fork | xor-join | and-join
  std::string origin;  // human-readable location within the diagram

  friend bool operator==(const GeneratedProperty&, const GeneratedProperty&) = default;
};

// Transformation of an activity diagram into temporal properties, one rule
// per recognizable shape:
//   chain      action a -> action b            G (a -> F b)
//   decision   q ? action b : action c         G ((q -> F b) xor ((not q) -> F c))
//   fork       action a -> fork -> b, c        G (a -> (F b and F c))
//   xor-join   actions a, c -> action b        G ((a xor c) -> F b)
//   and-join   actions a, c -> join -> b       G ((a and c) -> F b)
// Nodes are visited in creation order, so the output order is deterministic.
inline std::vector<GeneratedProperty> activity_to_ltl(const ActivityDiagram& a,
                                                      std::vector<std::string>* warnings = nullptr) {
  using NodeType = ActivityDiagram::NodeType;
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  auto A = [](const std::string& s) { return LtlFormula::atom(s); };
  auto F = [](LtlFormula f) { return LtlFormula::eventually(std::move(f)); };
  auto G = [](LtlFormula f) { return LtlFormula::always(std::move(f)); };

  std::vector<std::vector<std::size_t>> action_preds(a.nodes.size());
  for (const auto& e : a.edges)
    if (a.nodes[e.from].type == NodeType::action && !e.guard)
      if (a.nodes[e.to].type == NodeType::action) action_preds[e.to].push_back(e.from);

  std::vector<GeneratedProperty> out;
  for (std::size_t n = 0; n < a.nodes.size(); ++n) {
    const auto& node = a.nodes[n];
    switch (node.type) {
      case NodeType::action: {
        // Chain properties for successors that are not join targets; a
        // target fed by several actions becomes one xor-join property
        // emitted when the target is visited.
        for (const auto& e : a.edges) {
          if (e.from != n || e.guard) continue;
          if (a.nodes[e.to].type == NodeType::action && action_preds[e.to].size() == 1) {
            out.push_back({G(LtlFormula::implication(A(node.atom), F(A(a.nodes[e.to].atom)))),
                           "chain", node.atom + " -> " + a.nodes[e.to].atom});
          }
        }
        if (action_preds[n].size() >= 2) {
          LtlFormula lhs = A(a.nodes[action_preds[n][0]].atom);
          for (std::size_t k = 1; k < action_preds[n].size(); ++k)
            lhs = LtlFormula::exclusive(std::move(lhs), A(a.nodes[action_preds[n][k]].atom));
          out.push_back({G(LtlFormula::implication(std::move(lhs), F(A(node.atom)))),
                         "xor-join", "merge at " + node.atom});
        }
        break;
      }
      case NodeType::decision: {
        std::optional<std::size_t> then_a, else_a;
        for (const auto& e : a.edges) {
          if (e.from != n || !e.guard) continue;
          if (a.nodes[e.to].type == NodeType::action)
            (*e.guard ? then_a : else_a) = e.to;
        }
        if (then_a && else_a) {
          LtlFormula left = LtlFormula::implication(A(node.atom), F(A(a.nodes[*then_a].atom)));
          LtlFormula right = LtlFormula::implication(LtlFormula::negation(A(node.atom)),
                                                     F(A(a.nodes[*else_a].atom)));
          out.push_back({G(LtlFormula::exclusive(std::move(left), std::move(right))),
                         "decision", "decision on " + node.atom});
        } else {
          warn("decision on '" + node.atom +
               "' lacks an action on one branch: no property emitted");
        }
        break;
      }
      case NodeType::fork: {
        std::optional<std::size_t> trigger;
        for (const auto& e : a.edges)
          if (e.to == n && a.nodes[e.from].type == NodeType::action) trigger = e.from;
        std::vector<std::size_t> branches;
        for (const auto& e : a.edges)
          if (e.from == n && a.nodes[e.to].type == NodeType::action) branches.push_back(e.to);
        if (trigger && branches.size() >= 2) {
          LtlFormula rhs = F(A(a.nodes[branches[0]].atom));
          for (std::size_t k = 1; k < branches.size(); ++k)
            rhs = LtlFormula::conjunction(std::move(rhs), F(A(a.nodes[branches[k]].atom)));
          out.push_back({G(LtlFormula::implication(A(a.nodes[*trigger].atom), std::move(rhs))),
                         "fork", "fork after " + a.nodes[*trigger].atom});
        } else {
          warn("fork without a triggering action: no property emitted");
        }
        break;
      }
      case NodeType::join: {
        std::vector<std::size_t> ins;
        for (const auto& e : a.edges)
          if (e.to == n && a.nodes[e.from].type == NodeType::action) ins.push_back(e.from);
        std::optional<std::size_t> next;
        for (const auto& e : a.edges)
          if (e.from == n && a.nodes[e.to].type == NodeType::action) next = e.to;
        if (ins.size() >= 2 && next) {
          LtlFormula lhs = A(a.nodes[ins[0]].atom);
          for (std::size_t k = 1; k < ins.size(); ++k)
            lhs = LtlFormula::conjunction(std::move(lhs), A(a.nodes[ins[k]].atom));
          out.push_back({G(LtlFormula::implication(std::move(lhs), F(A(a.nodes[*next].atom)))),
                         "and-join", "join before " + a.nodes[*next].atom});
        }
        // A join feeding the final node carries no obligation of its own.
        break;
      }
      default:
        break;
    }
  }
  return out;
}

inline std::vector<GeneratedProperty> diagram_properties(
    const SequenceDiagram& d, std::vector<std::string>* warnings = nullptr) {
  return activity_to_ltl(seq_to_activity(d, warnings), warnings);
}

}  // namespace adsec
