#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adsec/adterm.hpp"
#include "adsec/box.hpp"
#include "adsec/errors.hpp"
#include "adsec/xml.hpp"

namespace adsec {

// Attack-defense trees. A node's kind (attack or defense) is positional:
// the root is an attack node and each counter edge flips the kind, so only
// the refinement and the children are stored.

enum class Refinement { disjunctive, conjunctive, sequential };

struct AdTreeNode {
  std::string label;
  Refinement refinement = Refinement::disjunctive;
  std::vector<AdTreeNode> children;               // same-kind refinements
  std::optional<Box<AdTreeNode>> counter;         // opposite-kind child

  friend bool operator==(const AdTreeNode&, const AdTreeNode&) = default;
};

struct AdTree {
  AdTreeNode root;

  friend bool operator==(const AdTree&, const AdTree&) = default;
};

inline AdTreeNode leaf(std::string label) { return AdTreeNode{std::move(label), Refinement::disjunctive, {}, {}}; }

namespace detail {

inline std::optional<std::string> structure_violation(const AdTreeNode& node, bool attack_side) {
  if (node.label.empty()) return "a node has an empty label";
  if (node.refinement == Refinement::sequential && !attack_side)
    return "defense node '" + node.label + "' uses a sequential refinement";
  std::set<std::string> labels;
  for (const AdTreeNode& c : node.children) {
    // Attack labels become term atoms, so siblings must stay distinct;
    // defense-side inner labels are descriptive only.
    if (!labels.insert(c.label).second && attack_side)
      return "node '" + node.label + "' has two children labelled '" + c.label + "'";
    if (auto v = structure_violation(c, attack_side)) return v;
  }
  if (node.counter)
    if (auto v = structure_violation(**node.counter, !attack_side)) return v;
  return std::nullopt;
}

}  // namespace detail

// First structural rule the tree breaks, if any: non-empty labels, distinct
// attack sibling labels, sequential refinements on attack nodes only. "At
// most one counter child" is enforced by the node shape itself.
inline std::optional<std::string> check_structure(const AdTree& tree) {
  return detail::structure_violation(tree.root, true);
}

namespace detail {

inline std::string trimmed(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline AdTreeNode read_tree_node(const XmlNode& el, bool attack_side) {
  AdTreeNode node;
  bool saw_counter = false;
  if (const std::string* r = el.attribute("refinement")) {
    if (*r == "disjunctive")
      node.refinement = Refinement::disjunctive;
    else if (*r == "conjunctive")
      node.refinement = Refinement::conjunctive;
    else if (*r == "sequential")
      node.refinement = Refinement::sequential;
    else
      throw ParseError("unknown refinement '" + *r + "'", el.line, el.column);
  }
  for (const XmlNode& child : el.children) {
    if (child.name == "label") {
      node.label = trimmed(child.text);
    } else if (child.name == "node") {
      const std::string* sw = child.attribute("switchRole");
      bool is_counter = sw && (*sw == "yes" || *sw == "true");
      if (is_counter) {
        if (saw_counter)
          throw StructureError("node '" + node.label + "' has two counter children");
        saw_counter = true;
        node.counter = Box<AdTreeNode>(read_tree_node(child, !attack_side));
      } else {
        node.children.push_back(read_tree_node(child, attack_side));
      }
    }
    // Other elements (ADTool domain annotations and the like) are ignored.
  }
  if (node.label.empty())
    throw StructureError("node at line " + std::to_string(el.line) + " has no label");
  if (node.refinement == Refinement::sequential && !attack_side)
    throw StructureError("defense node '" + node.label + "' uses a sequential refinement");
  std::set<std::string> labels;
  for (const AdTreeNode& c : node.children)
    if (!labels.insert(c.label).second && attack_side)
      throw StructureError("node '" + node.label + "' has two children labelled '" + c.label + "'");
  return node;
}

inline void write_tree_node(std::string& out, const AdTreeNode& node, bool is_counter,
                            int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  out += pad + "<node";
  if (node.refinement == Refinement::conjunctive)
    out += " refinement=\"conjunctive\"";
  else if (node.refinement == Refinement::sequential)
    out += " refinement=\"sequential\"";
  if (is_counter) out += " switchRole=\"yes\"";
  out += ">\n";
  out += pad + "  <label>" + xml_escape(node.label) + "</label>\n";
  for (const AdTreeNode& c : node.children) write_tree_node(out, c, false, depth + 1);
  if (node.counter) write_tree_node(out, **node.counter, true, depth + 1);
  out += pad + "</node>\n";
}

}  // namespace detail

inline AdTree parse_adtree(std::string_view xml) {
  XmlNode doc = parse_xml(xml);
  if (doc.name != "adtree")
    throw ParseError("root element must be <adtree>, found <" + doc.name + ">", doc.line,
                     doc.column);
  const XmlNode* root_el = nullptr;
  for (const XmlNode& c : doc.children) {
    if (c.name != "node") continue;
    if (root_el) throw StructureError("<adtree> holds more than one root node");
    root_el = &c;
  }
  if (!root_el) throw StructureError("<adtree> holds no root node");
  if (const std::string* sw = root_el->attribute("switchRole"))
    if (*sw == "yes" || *sw == "true")
      throw StructureError("the root node cannot switch roles");
  return AdTree{detail::read_tree_node(*root_el, true)};
}

inline AdTree load_adtree(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_adtree(buf.str());
}

inline std::string serialize_adtree(const AdTree& tree) {
  if (auto v = check_structure(tree)) throw StructureError(*v);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<adtree>\n";
  detail::write_tree_node(out, tree.root, false, 1);
  out += "</adtree>\n";
  return out;
}

inline void save_adtree(const AdTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << serialize_adtree(tree);
}

namespace detail {

inline bool plain_leaf(const AdTreeNode& n) { return n.children.empty() && !n.counter; }

// A step node becomes a basic attack-defense step when its children are all
// technique leaves and its counter is a single pattern leaf or a conjunction
// of pattern leaves. Technique labels become metadata, not term atoms.
inline std::optional<BadStep> try_bad_step(const AdTreeNode& node, Actor side) {
  if (side != Actor::proponent || !node.counter) return std::nullopt;
  for (const AdTreeNode& c : node.children)
    if (!plain_leaf(c)) return std::nullopt;
  const AdTreeNode& d = **node.counter;
  std::vector<std::string> patterns;
  if (plain_leaf(d)) {
    patterns.push_back(d.label);
  } else if (!d.counter && !d.children.empty() && d.refinement == Refinement::conjunctive) {
    for (const AdTreeNode& p : d.children) {
      if (!plain_leaf(p)) return std::nullopt;
      patterns.push_back(p.label);
    }
  } else {
    return std::nullopt;
  }
  std::vector<std::string> techniques;
  for (const AdTreeNode& c : node.children) techniques.push_back(c.label);
  return make_bad_step(node.label, std::move(patterns), std::move(techniques));
}

inline AdTerm node_term(const AdTreeNode& node, Actor side) {
  if (auto bs = try_bad_step(node, side)) return AdTerm::bad_step(std::move(*bs));
  AdTerm main = [&] {
    if (node.children.empty()) return AdTerm::atom(node.label, side);
    std::vector<AdTerm> kids;
    kids.reserve(node.children.size());
    for (const AdTreeNode& c : node.children) kids.push_back(node_term(c, side));
    switch (node.refinement) {
      case Refinement::disjunctive: return AdTerm::disjunction(side, std::move(kids));
      case Refinement::conjunctive: return AdTerm::conjunction(side, std::move(kids));
      default: return AdTerm::seq_conjunction(side, std::move(kids));
    }
  }();
  if (node.counter)
    return AdTerm::counter(side, std::move(main), node_term(**node.counter, opposite(side)));
  return main;
}

}  // namespace detail

// Interpretation of a tree as a term: refinements map to the operator of the
// node's kind, counter children map to c, leaf labels become atoms, and
// recognizable step nodes become basic attack-defense steps.
inline AdTerm to_adterm(const AdTree& tree) {
  if (auto v = check_structure(tree)) throw StructureError(*v);
  return detail::node_term(tree.root, Actor::proponent);
}

}  // namespace adsec
