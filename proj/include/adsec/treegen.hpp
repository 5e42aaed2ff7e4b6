#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adsec/adtree.hpp"
#include "adsec/csv.hpp"
#include "adsec/errors.hpp"
#include "adsec/kb.hpp"

namespace adsec {

// Alternative groups are addressed by the owning step's id plus the 1-based
// ordinal of the group in a pre-order walk of that step's defense subtree.
struct AlternativeGroup {
  std::string step;
  int ordinal = 0;
  std::vector<std::string> options;

  friend bool operator==(const AlternativeGroup&, const AlternativeGroup&) = default;
};

struct PatternChoice {
  std::map<std::pair<std::string, int>, std::string> selections;

  friend bool operator==(const PatternChoice&, const PatternChoice&) = default;
};

inline PatternChoice load_pattern_choice(const std::filesystem::path& path) {
  CsvTable table = load_csv(path);
  std::string origin = path.filename().string();
  std::size_t si = table.column("step-id", origin);
  std::size_t gi = table.column("group-ordinal", origin);
  std::size_t pi = table.column("chosen-pattern-id", origin);
  PatternChoice choice;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    int ordinal = 0;
    try {
      ordinal = std::stoi(row[gi]);
    } catch (const std::exception&) {
      throw ParseError(origin + ": row " + std::to_string(r + 2) +
                       ": group-ordinal '" + row[gi] + "' is not a number");
    }
    auto key = std::make_pair(row[si], ordinal);
    if (!choice.selections.emplace(key, row[pi]).second)
      throw ParseError(origin + ": row " + std::to_string(r + 2) +
                       ": duplicate selection for group " + row[si] + ":" + row[gi]);
  }
  return choice;
}

inline void save_pattern_choice(const PatternChoice& choice,
                                const std::filesystem::path& path) {
  CsvTable table;
  table.header = {"step-id", "group-ordinal", "chosen-pattern-id"};
  for (const auto& [key, pattern] : choice.selections)
    table.rows.push_back({key.first, std::to_string(key.second), pattern});
  save_csv(table, path);
}

namespace detail {

inline bool is_alternative_node(const AdTreeNode& n) {
  if (n.label != "Alternative" || n.refinement != Refinement::disjunctive ||
      n.children.empty())
    return false;
  return std::all_of(n.children.begin(), n.children.end(),
                     [](const AdTreeNode& c) { return plain_leaf(c); });
}

template <class Fn>
void walk_alternatives(AdTreeNode& defense, int& ordinal, Fn&& fn) {
  if (is_alternative_node(defense)) {
    ++ordinal;
    fn(defense, ordinal);
    return;  // replacement leaves no children to visit
  }
  for (AdTreeNode& c : defense.children) walk_alternatives(c, ordinal, fn);
}

inline void collect_defense_leaves(const AdTreeNode& n, std::vector<std::string>& out) {
  if (n.children.empty()) {
    if (std::find(out.begin(), out.end(), n.label) == out.end()) out.push_back(n.label);
    return;
  }
  for (const AdTreeNode& c : n.children) collect_defense_leaves(c, out);
}

}  // namespace detail

// All Alternative groups of a tree, in (document order of steps, pre-order
// within each defense) order.
inline std::vector<AlternativeGroup> alternative_groups(const AdTree& tree) {
  std::vector<AlternativeGroup> out;
  auto walk = [&](auto&& self, const AdTreeNode& n) -> void {
    if (n.counter) {
      int ordinal = 0;
      detail::walk_alternatives(const_cast<AdTreeNode&>(**n.counter), ordinal,
                                [&](AdTreeNode& alt, int ord) {
                                  AlternativeGroup g{n.label, ord, {}};
                                  for (const AdTreeNode& c : alt.children)
                                    g.options.push_back(c.label);
                                  out.push_back(std::move(g));
                                });
    }
    for (const AdTreeNode& c : n.children) self(self, c);
  };
  walk(walk, tree.root);
  return out;
}

namespace detail {

// Patterns countering a step, resolved through the mediation chain without
// requiring the step to exist as an entity (the empty-step fallback passes
// an attack id here).
inline std::set<std::string> step_pattern_ids(const KnowledgeBase& kb,
                                              const std::string& step_id) {
  std::set<std::string> found;
  for (const Relation* cm : kb.relations_from("countermeasure", step_id))
    for (const Relation* cl : kb.relations_from("cluster", cm->target_id))
      for (const Relation* pr : kb.relations_from("principle", cl->target_id))
        for (const Relation* sp : kb.relations_from("strongpoint", pr->target_id))
          for (const Relation* pa : kb.relations_from("pattern", sp->target_id))
            if (kb.patterns.count(pa->target_id)) found.insert(pa->target_id);
  return found;
}

// Builds the defense composition for one step. Alternative relations group
// patterns into disjunctive "Alternative" nodes (connected components),
// depend/benefit relations pair the remaining patterns under a labelled
// conjunctive node, leftovers stay single. A lone single pattern attaches
// directly; anything else sits under a conjunctive "Pattern Composition".
inline AdTreeNode defense_composition(const KnowledgeBase& kb,
                                      const std::set<std::string>& patterns) {
  std::vector<Relation> rels = relations_within(kb, patterns);

  std::map<std::string, std::string> component;  // pattern -> alternative root
  for (const std::string& p : patterns) component[p] = p;
  auto find_root = [&](std::string p) {
    while (component[p] != p) p = component[p];
    return p;
  };
  for (const Relation& r : rels)
    if (r.kind == "alternative") component[find_root(r.source_id)] = find_root(r.target_id);
  std::map<std::string, std::vector<std::string>> alt_members;
  for (const std::string& p : patterns) alt_members[find_root(p)].push_back(p);

  std::set<std::string> in_alternative;
  for (const auto& [root, members] : alt_members) {
    (void)root;
    if (members.size() > 1)
      for (const std::string& m : members) in_alternative.insert(m);
  }

  std::map<std::string, const Relation*> paired;  // member -> pairing relation
  for (const Relation& r : rels) {
    if (r.kind != "depend" && r.kind != "benefit") continue;
    if (in_alternative.count(r.source_id) || in_alternative.count(r.target_id)) continue;
    if (paired.count(r.source_id) || paired.count(r.target_id)) continue;
    paired[r.source_id] = &r;
    paired[r.target_id] = &r;
  }

  std::vector<AdTreeNode> groups;
  std::set<std::string> emitted;
  for (const std::string& p : patterns) {
    if (emitted.count(p)) continue;
    if (in_alternative.count(p)) {
      const std::vector<std::string>& members = alt_members[find_root(p)];
      AdTreeNode alt{"Alternative", Refinement::disjunctive, {}, {}};
      for (const std::string& m : members) {
        alt.children.push_back(AdTreeNode{m, Refinement::disjunctive, {}, {}});
        emitted.insert(m);
      }
      groups.push_back(std::move(alt));
    } else if (auto it = paired.find(p); it != paired.end()) {
      const Relation& r = *it->second;
      AdTreeNode pair{r.source_id + " " + r.kind + " " + r.target_id,
                      Refinement::conjunctive, {}, {}};
      pair.children.push_back(AdTreeNode{r.source_id, Refinement::disjunctive, {}, {}});
      pair.children.push_back(AdTreeNode{r.target_id, Refinement::disjunctive, {}, {}});
      emitted.insert(r.source_id);
      emitted.insert(r.target_id);
      groups.push_back(std::move(pair));
    } else {
      groups.push_back(AdTreeNode{p, Refinement::disjunctive, {}, {}});
      emitted.insert(p);
    }
  }

  if (groups.size() == 1 && groups.front().children.empty()) return std::move(groups.front());
  AdTreeNode composition{"Pattern Composition", Refinement::conjunctive, {}, {}};
  composition.children = std::move(groups);
  return composition;
}

inline AdTreeNode step_node(const KnowledgeBase& kb, const std::string& step_id,
                            std::vector<std::string>* warnings) {
  AdTreeNode node{step_id, Refinement::disjunctive, {}, {}};
  auto step = kb.steps.find(step_id);
  if (step != kb.steps.end())
    for (const std::string& tech : step->second.techniques) {
      auto it = kb.techniques.find(tech);
      std::string text = it != kb.techniques.end() ? it->second.text : tech;
      node.children.push_back(AdTreeNode{text, Refinement::disjunctive, {}, {}});
    }
  std::set<std::string> patterns = step_pattern_ids(kb, step_id);
  if (patterns.empty()) {
    if (warnings)
      warnings->push_back("step '" + step_id +
                          "' has no countermeasure patterns; no defense node attached");
  } else {
    node.counter = Box<AdTreeNode>(defense_composition(kb, patterns));
  }
  return node;
}

inline AdTreeNode attack_node(const KnowledgeBase& kb, const std::string& attack_id,
                              std::vector<std::string>* warnings) {
  auto it = kb.attacks.find(attack_id);
  if (it == kb.attacks.end()) throw NotFoundError("unknown attack '" + attack_id + "'");
  const Attack& attack = it->second;
  if (!attack.sub_attacks.empty()) {
    AdTreeNode node{attack_id, Refinement::disjunctive, {}, {}};
    for (const std::string& sub : attack.sub_attacks)
      node.children.push_back(attack_node(kb, sub, warnings));
    return node;
  }
  if (!attack.steps.empty()) {
    AdTreeNode node{attack_id, Refinement::sequential, {}, {}};
    for (const std::string& st : attack.steps) node.children.push_back(step_node(kb, st, warnings));
    return node;
  }
  if (warnings)
    warnings->push_back("attack '" + attack_id +
                        "' has no recorded steps; generated as a single step");
  return step_node(kb, attack_id, warnings);
}

}  // namespace detail

inline AdTree generate_attack_tree(const KnowledgeBase& kb, const std::string& attack_id,
                                   std::vector<std::string>* warnings = nullptr) {
  return AdTree{detail::attack_node(kb, attack_id, warnings)};
}

// Resolves every Alternative group per the choice, then flattens each defense
// to a plain pattern leaf or a conjunctive "Pattern Composition" of pattern
// leaves. Flattening is idempotent, so trees already in final form pass
// through unchanged.
inline AdTree choose_patterns(const AdTree& tree, const PatternChoice& choice) {
  AdTree out = tree;
  std::vector<std::string> unresolved;

  auto resolve = [&](auto&& self, AdTreeNode& n) -> void {
    for (AdTreeNode& c : n.children) self(self, c);
    if (!n.counter) return;
    int ordinal = 0;
    detail::walk_alternatives(**n.counter, ordinal, [&](AdTreeNode& alt, int ord) {
      auto it = choice.selections.find({n.label, ord});
      if (it == choice.selections.end()) {
        std::string options;
        for (const AdTreeNode& c : alt.children) {
          if (!options.empty()) options += " | ";
          options += c.label;
        }
        unresolved.push_back(n.label + ":" + std::to_string(ord) + " (options: " + options +
                             ")");
        return;
      }
      auto chosen = std::find_if(alt.children.begin(), alt.children.end(),
                                 [&](const AdTreeNode& c) { return c.label == it->second; });
      if (chosen == alt.children.end())
        throw InvalidSelectionError("pattern '" + it->second +
                                    "' is not an option of Alternative group " + n.label +
                                    ":" + std::to_string(ord));
      alt = *chosen;
    });
  };
  resolve(resolve, out.root);
  if (!unresolved.empty()) throw UnresolvedAlternativeError(unresolved);

  auto flatten = [&](auto&& self, AdTreeNode& n) -> void {
    for (AdTreeNode& c : n.children) self(self, c);
    if (!n.counter) return;
    std::vector<std::string> leaves;
    detail::collect_defense_leaves(**n.counter, leaves);
    if (leaves.size() == 1) {
      **n.counter = AdTreeNode{leaves.front(), Refinement::disjunctive, {}, {}};
    } else {
      AdTreeNode composition{"Pattern Composition", Refinement::conjunctive, {}, {}};
      for (const std::string& l : leaves)
        composition.children.push_back(AdTreeNode{l, Refinement::disjunctive, {}, {}});
      **n.counter = std::move(composition);
    }
  };
  flatten(flatten, out.root);
  return out;
}

// Pattern ids appearing as defense leaves anywhere in the tree.
inline std::set<std::string> pattern_set(const AdTree& tree) {
  std::set<std::string> out;
  auto walk = [&](auto&& self, const AdTreeNode& n) -> void {
    if (n.counter) {
      std::vector<std::string> leaves;
      detail::collect_defense_leaves(**n.counter, leaves);
      out.insert(leaves.begin(), leaves.end());
    }
    for (const AdTreeNode& c : n.children) self(self, c);
  };
  walk(walk, tree.root);
  return out;
}

// Refuses a pattern set containing both members of an impair or conflict
// relation.
inline void check_pattern_conflicts(const KnowledgeBase& kb,
                                    const std::set<std::string>& patterns) {
  for (const Relation& r : kb.relations) {
    if (r.kind != "impair" && r.kind != "conflict") continue;
    if (r.source_id == r.target_id) continue;
    if (patterns.count(r.source_id) && patterns.count(r.target_id))
      throw PatternConflictError("patterns '" + r.source_id + "' and '" + r.target_id +
                                 "' cannot be chosen together: " + r.source_id + " " +
                                 r.kind + " " + r.target_id);
  }
}

// Replaces every attack leaf of the initial tree by its generated and
// resolved subtree. Leaves are nodes with neither children nor counter.
inline AdTree expand(const AdTree& initial, const KnowledgeBase& kb,
                     const PatternChoice& choice,
                     std::vector<std::string>* warnings = nullptr) {
  AdTree out = initial;
  auto walk = [&](auto&& self, AdTreeNode& n) -> void {
    if (n.children.empty() && !n.counter) {
      if (!kb.attacks.count(n.label))
        throw NotFoundError("unknown attack '" + n.label + "' at initial-tree leaf");
      AdTree sub = choose_patterns(generate_attack_tree(kb, n.label, warnings), choice);
      n = std::move(sub.root);
      return;
    }
    for (AdTreeNode& c : n.children) self(self, c);
  };
  walk(walk, out.root);
  check_pattern_conflicts(kb, pattern_set(out));
  return out;
}

struct ReportEntry {
  std::string step, architecture, context;
  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct ArchitectureReport {
  std::vector<ReportEntry> entries;

  std::string to_text() const {
    std::string out = "Test architecture report\n";
    if (entries.empty()) return out + "  (no attack steps)\n";
    for (const ReportEntry& e : entries) {
      out += "  step " + e.step + " (context " + e.context + ")\n";
      out += "    " + e.architecture + "\n";
    }
    return out;
  }

  CsvTable to_table() const {
    CsvTable t;
    t.header = {"step-id", "context", "architecture"};
    for (const ReportEntry& e : entries) t.rows.push_back({e.step, e.context, e.architecture});
    return t;
  }
};

// One entry per BADStep of the final tree, in document order. Steps absent
// from the knowledge base (empty-step fallbacks) are skipped; they were
// already flagged at generation time.
inline ArchitectureReport build_report(const AdTree& tf, const KnowledgeBase& kb) {
  ArchitectureReport report;
  AdTerm term = to_adterm(tf);
  for (const BadStep& b : badsteps(term)) {
    if (!kb.steps.count(b.step)) continue;
    const TestArchitecture& arch = architecture_for(kb, b.step);
    report.entries.push_back(ReportEntry{b.step, arch.text, context_of_step(kb, b.step)});
  }
  return report;
}

}  // namespace adsec
