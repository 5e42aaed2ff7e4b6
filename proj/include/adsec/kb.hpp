#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adsec/csv.hpp"
#include "adsec/diagram.hpp"
#include "adsec/errors.hpp"

namespace adsec {

// Knowledge base: a directory of headered CSV tables describing attacks,
// their steps and techniques, the countermeasure-to-pattern mediation chain,
// test sections with procedures, architectures, contexts, sequence-diagram
// references and one typed relation table. Strict loading validates every
// integrity rule; the lax loader plus validate() reports violations instead.

enum class SectionKind { given, when, then };

inline std::string to_string(SectionKind k) {
  switch (k) {
    case SectionKind::given: return "given";
    case SectionKind::when: return "when";
    default: return "then";
  }
}

struct Attack {
  std::string id, name;
  std::vector<std::string> sub_attacks;  // relation order
  std::vector<std::string> steps;        // relation order

  friend bool operator==(const Attack&, const Attack&) = default;
};

struct AttackStep {
  std::string id, name, phase, ordinal;
  std::vector<std::string> techniques;  // relation order

  friend bool operator==(const AttackStep&, const AttackStep&) = default;
};

struct Technique {
  std::string id, text;
  friend bool operator==(const Technique&, const Technique&) = default;
};

struct SecurityPattern {
  std::string id, name;
  friend bool operator==(const SecurityPattern&, const SecurityPattern&) = default;
};

struct SecurityPrinciple {
  std::string id, name;
  friend bool operator==(const SecurityPrinciple&, const SecurityPrinciple&) = default;
};

struct Cluster {
  std::string id, name;
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct Countermeasure {
  std::string id, text;
  friend bool operator==(const Countermeasure&, const Countermeasure&) = default;
};

struct StrongPoint {
  std::string id, text;
  friend bool operator==(const StrongPoint&, const StrongPoint&) = default;
};

struct TestSection {
  std::string id;
  SectionKind kind = SectionKind::given;
  std::string title, procedure, context;

  friend bool operator==(const TestSection&, const TestSection&) = default;
};

struct Procedure {
  std::string id, comment, snippet;
  friend bool operator==(const Procedure&, const Procedure&) = default;
};

struct TestArchitecture {
  std::string id, text;
  friend bool operator==(const TestArchitecture&, const TestArchitecture&) = default;
};

struct ApplicationContext {
  std::string id, name;
  friend bool operator==(const ApplicationContext&, const ApplicationContext&) = default;
};

struct DiagramRef {
  std::string pattern, context, path;  // path relative to the base directory
  friend bool operator==(const DiagramRef&, const DiagramRef&) = default;
};

struct Relation {
  std::string source_type, source_id, kind, target_type, target_id;
  friend bool operator==(const Relation&, const Relation&) = default;
};

inline const std::set<std::string>& inter_pattern_kinds() {
  static const std::set<std::string> kinds{"depend", "benefit", "impair", "alternative",
                                           "conflict"};
  return kinds;
}

struct KnowledgeBase {
  std::filesystem::path base_dir;

  std::map<std::string, Attack> attacks;
  std::map<std::string, AttackStep> steps;
  std::map<std::string, Technique> techniques;
  std::map<std::string, SecurityPattern> patterns;
  std::map<std::string, SecurityPrinciple> principles;
  std::map<std::string, Cluster> clusters;
  std::map<std::string, Countermeasure> countermeasures;
  std::map<std::string, StrongPoint> strongpoints;
  std::map<std::string, TestSection> sections;
  std::map<std::string, Procedure> procedures;
  std::map<std::string, TestArchitecture> architectures;
  std::map<std::string, ApplicationContext> contexts;
  std::vector<DiagramRef> diagrams;
  std::vector<Relation> relations;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.attacks == b.attacks && a.steps == b.steps && a.techniques == b.techniques &&
           a.patterns == b.patterns && a.principles == b.principles &&
           a.clusters == b.clusters && a.countermeasures == b.countermeasures &&
           a.strongpoints == b.strongpoints && a.sections == b.sections &&
           a.procedures == b.procedures && a.architectures == b.architectures &&
           a.contexts == b.contexts && a.diagrams == b.diagrams && a.relations == b.relations;
  }

  std::vector<const Relation*> relations_from(const std::string& kind,
                                              const std::string& source_id) const {
    std::vector<const Relation*> out;
    for (const Relation& r : relations)
      if (r.kind == kind && r.source_id == source_id) out.push_back(&r);
    return out;
  }
};

namespace detail {

// kind -> (source entity type, target entity type)
inline const std::map<std::string, std::pair<std::string, std::string>>& relation_schema() {
  static const std::map<std::string, std::pair<std::string, std::string>> schema{
      {"sub", {"attack", "attack"}},
      {"step", {"attack", "step"}},
      {"technique", {"step", "technique"}},
      {"countermeasure", {"step", "countermeasure"}},
      {"cluster", {"countermeasure", "cluster"}},
      {"principle", {"cluster", "principle"}},
      {"subprinciple", {"principle", "principle"}},
      {"strongpoint", {"principle", "strongpoint"}},
      {"pattern", {"strongpoint", "pattern"}},
      {"depend", {"pattern", "pattern"}},
      {"benefit", {"pattern", "pattern"}},
      {"impair", {"pattern", "pattern"}},
      {"alternative", {"pattern", "pattern"}},
      {"conflict", {"pattern", "pattern"}},
      {"testG", {"step", "section"}},
      {"testW", {"step", "section"}},
      {"testT", {"step", "section"}},
      {"architecture", {"step", "architecture"}},
      {"context", {"step", "context"}},
  };
  return schema;
}

template <class T, class Make>
void load_entity_table(const std::filesystem::path& dir, const std::string& file,
                       const std::vector<std::string>& columns, std::map<std::string, T>& out,
                       Make make) {
  std::filesystem::path path = dir / file;
  if (!std::filesystem::exists(path)) throw IoError("missing knowledge-base file: " + path.string());
  CsvTable table = load_csv(path);
  std::vector<std::size_t> idx;
  for (const std::string& c : columns) idx.push_back(table.column(c, file));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> fields;
    for (std::size_t i : idx) fields.push_back(table.rows[r][i]);
    if (fields.front().empty())
      throw ParseError(file + ": row " + std::to_string(r + 2) + " has an empty id");
    T entity = make(fields);
    if (!out.emplace(fields.front(), std::move(entity)).second)
      throw ParseError(file + ": duplicate id '" + fields.front() + "' at row " +
                       std::to_string(r + 2));
  }
}

}  // namespace detail

// Loads a knowledge-base directory without integrity validation. Missing
// files, malformed CSV, duplicate or empty ids still raise errors.
inline KnowledgeBase load_kb_raw(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("knowledge base directory not found: " + dir.string());
  KnowledgeBase kb;
  kb.base_dir = dir;
  using detail::load_entity_table;
  load_entity_table<Attack>(dir, "attacks.csv", {"id", "name"}, kb.attacks,
                            [](auto& f) { return Attack{f[0], f[1], {}, {}}; });
  load_entity_table<AttackStep>(dir, "steps.csv", {"id", "name", "phase", "ordinal"}, kb.steps,
                                [](auto& f) { return AttackStep{f[0], f[1], f[2], f[3], {}}; });
  load_entity_table<Technique>(dir, "techniques.csv", {"id", "text"}, kb.techniques,
                               [](auto& f) { return Technique{f[0], f[1]}; });
  load_entity_table<SecurityPattern>(dir, "patterns.csv", {"id", "name"}, kb.patterns,
                                     [](auto& f) { return SecurityPattern{f[0], f[1]}; });
  load_entity_table<SecurityPrinciple>(dir, "principles.csv", {"id", "name"}, kb.principles,
                                       [](auto& f) { return SecurityPrinciple{f[0], f[1]}; });
  load_entity_table<Cluster>(dir, "clusters.csv", {"id", "name"}, kb.clusters,
                             [](auto& f) { return Cluster{f[0], f[1]}; });
  load_entity_table<Countermeasure>(dir, "countermeasures.csv", {"id", "text"},
                                    kb.countermeasures,
                                    [](auto& f) { return Countermeasure{f[0], f[1]}; });
  load_entity_table<StrongPoint>(dir, "strongpoints.csv", {"id", "text"}, kb.strongpoints,
                                 [](auto& f) { return StrongPoint{f[0], f[1]}; });
  load_entity_table<TestSection>(
      dir, "sections.csv", {"id", "kind", "title", "procedure", "context"}, kb.sections,
      [](auto& f) {
        SectionKind kind;
        if (f[1] == "given")
          kind = SectionKind::given;
        else if (f[1] == "when")
          kind = SectionKind::when;
        else if (f[1] == "then")
          kind = SectionKind::then;
        else
          throw ParseError("sections.csv: unknown section kind '" + f[1] + "' for '" + f[0] +
                           "'");
        return TestSection{f[0], kind, f[2], f[3], f[4]};
      });
  load_entity_table<Procedure>(dir, "procedures.csv", {"id", "comment", "snippet"},
                               kb.procedures,
                               [](auto& f) { return Procedure{f[0], f[1], f[2]}; });
  load_entity_table<TestArchitecture>(dir, "architectures.csv", {"id", "text"},
                                      kb.architectures,
                                      [](auto& f) { return TestArchitecture{f[0], f[1]}; });
  load_entity_table<ApplicationContext>(dir, "contexts.csv", {"id", "name"}, kb.contexts,
                                        [](auto& f) { return ApplicationContext{f[0], f[1]}; });

  {
    std::filesystem::path path = dir / "diagrams.csv";
    if (!std::filesystem::exists(path))
      throw IoError("missing knowledge-base file: " + path.string());
    CsvTable table = load_csv(path);
    std::size_t pi = table.column("pattern", "diagrams.csv");
    std::size_t ci = table.column("context", "diagrams.csv");
    std::size_t fi = table.column("path", "diagrams.csv");
    for (const auto& row : table.rows)
      kb.diagrams.push_back(DiagramRef{row[pi], row[ci], row[fi]});
  }
  {
    std::filesystem::path path = dir / "relations.csv";
    if (!std::filesystem::exists(path))
      throw IoError("missing knowledge-base file: " + path.string());
    CsvTable table = load_csv(path);
    std::size_t st = table.column("source-type", "relations.csv");
    std::size_t si = table.column("source-id", "relations.csv");
    std::size_t k = table.column("relation-kind", "relations.csv");
    std::size_t tt = table.column("target-type", "relations.csv");
    std::size_t ti = table.column("target-id", "relations.csv");
    for (const auto& row : table.rows)
      kb.relations.push_back(Relation{row[st], row[si], row[k], row[tt], row[ti]});
  }

  // Materialize the ordered membership lists.
  for (const Relation& r : kb.relations) {
    if (r.kind == "sub") {
      auto it = kb.attacks.find(r.source_id);
      if (it != kb.attacks.end()) it->second.sub_attacks.push_back(r.target_id);
    } else if (r.kind == "step") {
      auto it = kb.attacks.find(r.source_id);
      if (it != kb.attacks.end()) it->second.steps.push_back(r.target_id);
    } else if (r.kind == "technique") {
      auto it = kb.steps.find(r.source_id);
      if (it != kb.steps.end()) it->second.techniques.push_back(r.target_id);
    }
  }
  return kb;
}

namespace detail {

inline bool entity_exists(const KnowledgeBase& kb, const std::string& type,
                          const std::string& id) {
  if (type == "attack") return kb.attacks.count(id) != 0;
  if (type == "step") return kb.steps.count(id) != 0;
  if (type == "technique") return kb.techniques.count(id) != 0;
  if (type == "pattern") return kb.patterns.count(id) != 0;
  if (type == "principle") return kb.principles.count(id) != 0;
  if (type == "cluster") return kb.clusters.count(id) != 0;
  if (type == "countermeasure") return kb.countermeasures.count(id) != 0;
  if (type == "strongpoint") return kb.strongpoints.count(id) != 0;
  if (type == "section") return kb.sections.count(id) != 0;
  if (type == "architecture") return kb.architectures.count(id) != 0;
  if (type == "context") return kb.contexts.count(id) != 0;
  return false;
}

}  // namespace detail

// Integrity validation. Each violation message names the rule, the entity
// and, where one is involved, the relation kind.
inline std::vector<std::string> validate(const KnowledgeBase& kb) {
  std::vector<std::string> out;
  auto flag = [&](const std::string& rule, const std::string& entity,
                  const std::string& relation, const std::string& detail) {
    std::string msg = rule + ": entity '" + entity + "'";
    if (!relation.empty()) msg += " (relation " + relation + ")";
    if (!detail.empty()) msg += ": " + detail;
    out.push_back(msg);
  };

  for (const Relation& r : kb.relations) {
    auto schema = detail::relation_schema().find(r.kind);
    if (schema == detail::relation_schema().end()) {
      flag("unknown-relation-kind", r.source_id, r.kind, "");
      continue;
    }
    if (r.source_type != schema->second.first || r.target_type != schema->second.second) {
      flag("relation-type-mismatch", r.source_id, r.kind,
           "expected " + schema->second.first + " -> " + schema->second.second + ", found " +
               r.source_type + " -> " + r.target_type);
      continue;
    }
    if (!detail::entity_exists(kb, r.source_type, r.source_id))
      flag("dangling-relation-source", r.source_id, r.kind,
           "no " + r.source_type + " with this id");
    if (!detail::entity_exists(kb, r.target_type, r.target_id))
      flag("dangling-relation-target", r.target_id, r.kind,
           "no " + r.target_type + " with this id");
    if (inter_pattern_kinds().count(r.kind) && r.source_id == r.target_id)
      flag("self-related-pattern", r.source_id, r.kind, "");
  }

  // Sections: one Given, one When, one Then per step; the section kind must
  // match the relation it hangs on; its context must be the step's context.
  for (const auto& [step_id, step] : kb.steps) {
    (void)step;
    const struct {
      const char* relation;
      SectionKind kind;
    } slots[] = {{"testG", SectionKind::given}, {"testW", SectionKind::when},
                 {"testT", SectionKind::then}};
    for (const auto& slot : slots) {
      auto links = kb.relations_from(slot.relation, step_id);
      if (links.empty())
        flag("missing-test-section", step_id, slot.relation, "step has no section");
      if (links.size() > 1)
        flag("duplicate-test-section", step_id, slot.relation,
             std::to_string(links.size()) + " sections attached");
      for (const Relation* r : links) {
        auto sec = kb.sections.find(r->target_id);
        if (sec == kb.sections.end()) continue;  // dangling, already flagged
        if (sec->second.kind != slot.kind)
          flag("section-kind-mismatch", sec->first, slot.relation,
               "section kind is '" + to_string(sec->second.kind) + "'");
      }
    }
    auto archs = kb.relations_from("architecture", step_id);
    if (archs.size() != 1)
      flag("step-architecture-count", step_id, "architecture",
           std::to_string(archs.size()) + " architectures attached, expected 1");
    auto ctxs = kb.relations_from("context", step_id);
    if (ctxs.size() != 1)
      flag("step-context-count", step_id, "context",
           std::to_string(ctxs.size()) + " contexts attached, expected 1");
    if (ctxs.size() == 1) {
      const std::string& step_ctx = ctxs.front()->target_id;
      for (const auto& slot : slots)
        for (const Relation* r : kb.relations_from(slot.relation, step_id)) {
          auto sec = kb.sections.find(r->target_id);
          if (sec != kb.sections.end() && sec->second.context != step_ctx)
            flag("section-context-mismatch", sec->first, slot.relation,
                 "section context '" + sec->second.context + "' differs from step context '" +
                     step_ctx + "'");
        }
    }
  }

  for (const auto& [id, sec] : kb.sections) {
    if (!kb.procedures.count(sec.procedure))
      flag("unknown-procedure", id, "", "procedure '" + sec.procedure + "' not found");
    if (!kb.contexts.count(sec.context))
      flag("unknown-context", id, "", "context '" + sec.context + "' not found");
  }

  // Principle hierarchy: acyclic, at most four levels.
  {
    std::map<std::string, std::vector<std::string>> children;
    std::set<std::string> has_parent;
    for (const Relation& r : kb.relations)
      if (r.kind == "subprinciple" && kb.principles.count(r.source_id) &&
          kb.principles.count(r.target_id)) {
        children[r.source_id].push_back(r.target_id);
        has_parent.insert(r.target_id);
      }
    std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
    std::map<std::string, int> depth_of;
    bool cycle = false;
    auto dfs = [&](auto&& self, const std::string& id, int depth) -> int {
      if (state[id] == 1) {
        if (!cycle) flag("principle-hierarchy-cycle", id, "subprinciple", "");
        cycle = true;
        return depth;
      }
      state[id] = 1;
      int deepest = depth;
      for (const std::string& c : children[id])
        deepest = std::max(deepest, self(self, c, depth + 1));
      state[id] = 2;
      depth_of[id] = deepest;
      return deepest;
    };
    for (const auto& [id, p] : kb.principles) {
      (void)p;
      if (has_parent.count(id)) continue;
      int deepest = dfs(dfs, id, 1);
      if (deepest > 4)
        flag("principle-hierarchy-depth", id, "subprinciple",
             "hierarchy reaches depth " + std::to_string(deepest) + ", maximum is 4");
    }
    if (!cycle) {
      // Roots in a cycle are never reached from above; sweep the leftovers.
      for (const auto& [id, p] : kb.principles) {
        (void)p;
        if (state[id] == 0 && has_parent.count(id)) dfs(dfs, id, 1);
      }
    }
  }

  // Sub-attack graph: acyclic.
  {
    std::map<std::string, int> state;
    auto dfs = [&](auto&& self, const std::string& id) -> bool {
      if (state[id] == 1) return false;
      if (state[id] == 2) return true;
      state[id] = 1;
      auto it = kb.attacks.find(id);
      if (it != kb.attacks.end())
        for (const std::string& sub : it->second.sub_attacks)
          if (!self(self, sub)) {
            state[id] = 2;
            return false;
          }
      state[id] = 2;
      return true;
    };
    for (const auto& [id, a] : kb.attacks) {
      (void)a;
      std::map<std::string, int> fresh;
      state.swap(fresh);
      if (!dfs(dfs, id)) {
        flag("sub-attack-cycle", id, "sub", "");
        break;
      }
    }
  }

  for (const DiagramRef& d : kb.diagrams) {
    if (!kb.patterns.count(d.pattern))
      flag("unknown-pattern", d.pattern, "", "diagram references a missing pattern");
    if (!kb.contexts.count(d.context))
      flag("unknown-context", d.context, "", "diagram references a missing context");
    if (!std::filesystem::exists(kb.base_dir / d.path))
      flag("missing-diagram-file", d.pattern, "",
           "path '" + d.path + "' does not resolve under " + kb.base_dir.string());
  }
  return out;
}

// Strict load: every integrity rule must hold.
inline KnowledgeBase load_kb(const std::filesystem::path& dir) {
  KnowledgeBase kb = load_kb_raw(dir);
  std::vector<std::string> violations = validate(kb);
  if (!violations.empty()) throw KbIntegrityError(std::move(violations));
  return kb;
}

inline void save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& file, CsvTable table) {
    save_csv(table, dir / file);
  };
  auto table_of = [](std::vector<std::string> header) {
    CsvTable t;
    t.header = std::move(header);
    return t;
  };

  CsvTable t = table_of({"id", "name"});
  for (const auto& [id, a] : kb.attacks) t.rows.push_back({id, a.name});
  write("attacks.csv", std::move(t));

  t = table_of({"id", "name", "phase", "ordinal"});
  for (const auto& [id, s] : kb.steps) t.rows.push_back({id, s.name, s.phase, s.ordinal});
  write("steps.csv", std::move(t));

  t = table_of({"id", "text"});
  for (const auto& [id, x] : kb.techniques) t.rows.push_back({id, x.text});
  write("techniques.csv", std::move(t));

  t = table_of({"id", "name"});
  for (const auto& [id, x] : kb.patterns) t.rows.push_back({id, x.name});
  write("patterns.csv", std::move(t));

  t = table_of({"id", "name"});
  for (const auto& [id, x] : kb.principles) t.rows.push_back({id, x.name});
  write("principles.csv", std::move(t));

  t = table_of({"id", "name"});
  for (const auto& [id, x] : kb.clusters) t.rows.push_back({id, x.name});
  write("clusters.csv", std::move(t));

  t = table_of({"id", "text"});
  for (const auto& [id, x] : kb.countermeasures) t.rows.push_back({id, x.text});
  write("countermeasures.csv", std::move(t));

  t = table_of({"id", "text"});
  for (const auto& [id, x] : kb.strongpoints) t.rows.push_back({id, x.text});
  write("strongpoints.csv", std::move(t));

  t = table_of({"id", "kind", "title", "procedure", "context"});
  for (const auto& [id, s] : kb.sections)
    t.rows.push_back({id, to_string(s.kind), s.title, s.procedure, s.context});
  write("sections.csv", std::move(t));

  t = table_of({"id", "comment", "snippet"});
  for (const auto& [id, p] : kb.procedures) t.rows.push_back({id, p.comment, p.snippet});
  write("procedures.csv", std::move(t));

  t = table_of({"id", "text"});
  for (const auto& [id, a] : kb.architectures) t.rows.push_back({id, a.text});
  write("architectures.csv", std::move(t));

  t = table_of({"id", "name"});
  for (const auto& [id, c] : kb.contexts) t.rows.push_back({id, c.name});
  write("contexts.csv", std::move(t));

  t = table_of({"pattern", "context", "path"});
  for (const DiagramRef& d : kb.diagrams) t.rows.push_back({d.pattern, d.context, d.path});
  write("diagrams.csv", std::move(t));

  t = table_of({"source-type", "source-id", "relation-kind", "target-type", "target-id"});
  for (const Relation& r : kb.relations)
    t.rows.push_back({r.source_type, r.source_id, r.kind, r.target_type, r.target_id});
  write("relations.csv", std::move(t));

  // Carry referenced diagram documents along when they exist.
  for (const DiagramRef& d : kb.diagrams) {
    std::filesystem::path src = kb.base_dir / d.path;
    if (!std::filesystem::exists(src)) continue;
    std::filesystem::path dst = dir / d.path;
    std::filesystem::create_directories(dst.parent_path());
    std::filesystem::copy_file(src, dst, std::filesystem::copy_options::overwrite_existing);
  }
}

// Patterns countering a step, reached through the mediation chain
// step -> countermeasure -> cluster -> principle -> strong point -> pattern,
// each annotated with the inter-pattern relations whose two endpoints both
// belong to the result.
struct PatternAnnotation {
  std::string id;
  std::vector<Relation> relations;

  friend bool operator==(const PatternAnnotation&, const PatternAnnotation&) = default;
};

inline std::vector<PatternAnnotation> countermeasure_patterns(const KnowledgeBase& kb,
                                                              const std::string& step_id) {
  if (!kb.steps.count(step_id)) throw NotFoundError("unknown attack step '" + step_id + "'");
  std::set<std::string> found;
  for (const Relation* cm : kb.relations_from("countermeasure", step_id))
    for (const Relation* cl : kb.relations_from("cluster", cm->target_id))
      for (const Relation* pr : kb.relations_from("principle", cl->target_id))
        for (const Relation* sp : kb.relations_from("strongpoint", pr->target_id))
          for (const Relation* pa : kb.relations_from("pattern", sp->target_id))
            if (kb.patterns.count(pa->target_id)) found.insert(pa->target_id);
  std::vector<PatternAnnotation> out;
  for (const std::string& id : found) {
    PatternAnnotation a{id, {}};
    for (const Relation& r : kb.relations)
      if (inter_pattern_kinds().count(r.kind) && (r.source_id == id || r.target_id == id) &&
          found.count(r.source_id) && found.count(r.target_id))
        a.relations.push_back(r);
    out.push_back(std::move(a));
  }
  return out;
}

// Inter-pattern relations of the given kinds with both endpoints inside `ids`.
inline std::vector<Relation> relations_within(const KnowledgeBase& kb,
                                              const std::set<std::string>& ids) {
  std::vector<Relation> out;
  for (const Relation& r : kb.relations)
    if (inter_pattern_kinds().count(r.kind) && ids.count(r.source_id) &&
        ids.count(r.target_id))
      out.push_back(r);
  return out;
}

// The three test sections of a step for one application context, with their
// procedures resolved.
struct GwtSections {
  TestSection given, when, then;
  Procedure given_procedure, when_procedure, then_procedure;
};

inline GwtSections test_sections(const KnowledgeBase& kb, const std::string& step_id,
                                 const std::string& context_id) {
  if (!kb.steps.count(step_id)) throw NotFoundError("unknown attack step '" + step_id + "'");
  if (!kb.contexts.count(context_id))
    throw NotFoundError("unknown application context '" + context_id + "'");
  auto pick = [&](const char* relation) -> TestSection {
    for (const Relation* r : kb.relations_from(relation, step_id)) {
      auto it = kb.sections.find(r->target_id);
      if (it != kb.sections.end() && it->second.context == context_id) return it->second;
    }
    throw MissingSectionError(step_id, relation, context_id);
  };
  auto procedure = [&](const TestSection& s) -> Procedure {
    auto it = kb.procedures.find(s.procedure);
    if (it == kb.procedures.end())
      throw NotFoundError("unknown procedure '" + s.procedure + "' on section '" + s.id + "'");
    return it->second;
  };
  GwtSections out{pick("testG"), pick("testW"), pick("testT"), {}, {}, {}};
  out.given_procedure = procedure(out.given);
  out.when_procedure = procedure(out.when);
  out.then_procedure = procedure(out.then);
  return out;
}

inline const TestArchitecture& architecture_for(const KnowledgeBase& kb,
                                                const std::string& step_id) {
  if (!kb.steps.count(step_id)) throw NotFoundError("unknown attack step '" + step_id + "'");
  auto links = kb.relations_from("architecture", step_id);
  if (links.size() != 1)
    throw NotFoundError("step '" + step_id + "' is linked to " +
                        std::to_string(links.size()) + " architectures, expected 1");
  auto it = kb.architectures.find(links.front()->target_id);
  if (it == kb.architectures.end())
    throw NotFoundError("unknown architecture '" + links.front()->target_id + "'");
  return it->second;
}

inline std::string context_of_step(const KnowledgeBase& kb, const std::string& step_id) {
  auto links = kb.relations_from("context", step_id);
  if (links.size() != 1)
    throw NotFoundError("step '" + step_id + "' is linked to " +
                        std::to_string(links.size()) + " contexts, expected 1");
  return links.front()->target_id;
}

// Sequence diagrams stored for a pattern in one context, parsed on demand.
inline std::vector<SequenceDiagram> diagrams_for(const KnowledgeBase& kb,
                                                 const std::string& pattern_id,
                                                 const std::string& context_id) {
  if (!kb.patterns.count(pattern_id))
    throw NotFoundError("unknown security pattern '" + pattern_id + "'");
  std::vector<SequenceDiagram> out;
  for (const DiagramRef& d : kb.diagrams)
    if (d.pattern == pattern_id && d.context == context_id)
      out.push_back(load_diagram(kb.base_dir / d.path));
  return out;
}

// Owning attack of a step: the first attack (by id) whose step list holds it.
inline std::optional<std::string> attack_of_step(const KnowledgeBase& kb,
                                                 const std::string& step_id) {
  for (const auto& [id, a] : kb.attacks)
    if (std::find(a.steps.begin(), a.steps.end(), step_id) != a.steps.end()) return id;
  return std::nullopt;
}

// Root ancestor in the sub-attack forest.
inline std::string root_attack(const KnowledgeBase& kb, const std::string& attack_id) {
  std::string current = attack_id;
  std::set<std::string> seen;
  for (;;) {
    if (!seen.insert(current).second) return current;  // cycle guard
    std::optional<std::string> parent;
    for (const auto& [id, a] : kb.attacks)
      if (std::find(a.sub_attacks.begin(), a.sub_attacks.end(), current) !=
          a.sub_attacks.end()) {
        parent = id;
        break;
      }
    if (!parent) return current;
    current = *parent;
  }
}

}  // namespace adsec
