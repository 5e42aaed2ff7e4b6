#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adsec/errors.hpp"

namespace adsec {

// Attack-defense terms. Refinement operators are n-ary (n >= 1) and are kept
// in a canonical form: same-operator same-actor nesting is flattened away and
// single-child operator nodes collapse to the child, so structural equality
// coincides with equality up to associativity. The counter operator c is
// binary and never flattens.

enum class Actor { proponent, opponent };

inline Actor opposite(Actor a) {
  return a == Actor::proponent ? Actor::opponent : Actor::proponent;
}

inline std::string actor_mark(Actor a) { return a == Actor::proponent ? "p" : "o"; }

enum class TermKind {
  atom,          // named action of one actor
  bad_step,      // basic attack-defense step c^p(st, sp)
  disjunction,   // v^p / v^o
  conjunction,   // ^^p / ^^o (order irrelevant to truth)
  seq_conjunction,  // sequential conjunction, left-to-right order
  counter        // c^p / c^o, binary
};

// Basic attack-defense step: an attack step countered by one pattern or a
// conjunction of patterns. Techniques ride along as metadata and take no
// part in term structure or evaluation.
struct BadStep {
  std::string step;
  std::vector<std::string> patterns;    // sorted, unique, non-empty
  std::vector<std::string> techniques;  // free-form labels, document order

  friend bool operator==(const BadStep&, const BadStep&) = default;
};

inline BadStep make_bad_step(std::string step, std::vector<std::string> patterns,
                             std::vector<std::string> techniques = {}) {
  if (step.empty()) throw MalformedTermError("a basic step needs a step label");
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  if (patterns.empty())
    throw MalformedTermError("basic step '" + step + "' needs at least one pattern");
  return BadStep{std::move(step), std::move(patterns), std::move(techniques)};
}

class AdTerm {
 public:
  static AdTerm atom(std::string label, Actor side = Actor::proponent) {
    if (label.empty()) throw MalformedTermError("atom label must be non-empty");
    AdTerm t;
    t.kind_ = TermKind::atom;
    t.side_ = side;
    t.label_ = std::move(label);
    return t;
  }

  static AdTerm bad_step(BadStep step) {
    if (step.patterns.empty())
      throw MalformedTermError("basic step '" + step.step + "' needs at least one pattern");
    AdTerm t;
    t.kind_ = TermKind::bad_step;
    t.side_ = Actor::proponent;
    t.label_ = step.step;
    t.step_ = std::move(step);
    return t;
  }

  static AdTerm disjunction(Actor side, std::vector<AdTerm> children) {
    return refined(TermKind::disjunction, side, std::move(children));
  }
  static AdTerm conjunction(Actor side, std::vector<AdTerm> children) {
    return refined(TermKind::conjunction, side, std::move(children));
  }
  static AdTerm seq_conjunction(Actor side, std::vector<AdTerm> children) {
    return refined(TermKind::seq_conjunction, side, std::move(children));
  }

  static AdTerm counter(Actor side, AdTerm action, AdTerm defense) {
    if (action.side() != side)
      throw MalformedTermError("counter action must belong to the countered actor");
    if (defense.side() != opposite(side))
      throw MalformedTermError("counter defense must belong to the opposite actor");
    AdTerm t;
    t.kind_ = TermKind::counter;
    t.side_ = side;
    t.children_.push_back(std::move(action));
    t.children_.push_back(std::move(defense));
    return t;
  }

  TermKind kind() const { return kind_; }
  Actor side() const { return side_; }

  // Atom label, or the step label of a basic step.
  const std::string& label() const { return label_; }

  const BadStep& step() const {
    if (kind_ != TermKind::bad_step) throw MalformedTermError("term is not a basic step");
    return *step_;
  }

  const std::vector<AdTerm>& children() const { return children_; }

  bool is_leaf() const { return kind_ == TermKind::atom || kind_ == TermKind::bad_step; }

  friend bool operator==(const AdTerm& a, const AdTerm& b) {
    if (a.kind_ != b.kind_ || a.side_ != b.side_) return false;
    switch (a.kind_) {
      case TermKind::atom: return a.label_ == b.label_;
      case TermKind::bad_step: return *a.step_ == *b.step_;
      default: return a.children_ == b.children_;
    }
  }

 private:
  AdTerm() = default;

  static AdTerm refined(TermKind kind, Actor side, std::vector<AdTerm> children) {
    if (children.empty())
      throw MalformedTermError("refinement operators take at least one child");
    std::vector<AdTerm> flat;
    for (AdTerm& c : children) {
      if (c.side() != side)
        throw MalformedTermError("refinement children must share the operator's actor");
      if (c.kind_ == kind) {
        for (AdTerm& gc : c.children_) flat.push_back(std::move(gc));
      } else {
        flat.push_back(std::move(c));
      }
    }
    if (flat.size() == 1) return std::move(flat.front());
    AdTerm t;
    t.kind_ = kind;
    t.side_ = side;
    t.children_ = std::move(flat);
    return t;
  }

  TermKind kind_ = TermKind::atom;
  Actor side_ = Actor::proponent;
  std::string label_;
  std::optional<BadStep> step_;
  std::vector<AdTerm> children_;
};

// Shorthand constructors for the common proponent/opponent forms.
inline AdTerm or_p(std::vector<AdTerm> c) { return AdTerm::disjunction(Actor::proponent, std::move(c)); }
inline AdTerm and_p(std::vector<AdTerm> c) { return AdTerm::conjunction(Actor::proponent, std::move(c)); }
inline AdTerm seq_p(std::vector<AdTerm> c) { return AdTerm::seq_conjunction(Actor::proponent, std::move(c)); }
inline AdTerm or_o(std::vector<AdTerm> c) { return AdTerm::disjunction(Actor::opponent, std::move(c)); }
inline AdTerm and_o(std::vector<AdTerm> c) { return AdTerm::conjunction(Actor::opponent, std::move(c)); }
inline AdTerm c_p(AdTerm action, AdTerm defense) {
  return AdTerm::counter(Actor::proponent, std::move(action), std::move(defense));
}
inline AdTerm c_o(AdTerm action, AdTerm defense) {
  return AdTerm::counter(Actor::opponent, std::move(action), std::move(defense));
}

namespace detail {

inline bool plain_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.' || c == ':';
    if (!ok) return false;
  }
  return true;
}

inline std::string quoted_label(const std::string& s) {
  if (plain_token(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string to_string(const AdTerm& t) {
  switch (t.kind()) {
    case TermKind::atom:
      return detail::quoted_label(t.label());
    case TermKind::bad_step: {
      const BadStep& b = t.step();
      std::string sp;
      if (b.patterns.size() == 1) {
        sp = detail::quoted_label(b.patterns.front());
      } else {
        sp = "and^o(";
        for (std::size_t i = 0; i < b.patterns.size(); ++i) {
          if (i) sp += ", ";
          sp += detail::quoted_label(b.patterns[i]);
        }
        sp += ")";
      }
      return "c^p(" + detail::quoted_label(b.step) + ", " + sp + ")";
    }
    case TermKind::counter: {
      return "c^" + actor_mark(t.side()) + "(" + to_string(t.children()[0]) + ", " +
             to_string(t.children()[1]) + ")";
    }
    default: {
      std::string op = t.kind() == TermKind::disjunction ? "or"
                      : t.kind() == TermKind::conjunction ? "and"
                                                          : "seq";
      std::string out = op + "^" + actor_mark(t.side()) + "(";
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.children()[i]);
      }
      return out + ")";
    }
  }
}

// Evaluation key of a leaf: atom label, or the step label of a basic step.
inline const std::string& atom_key(const AdTerm& t) { return t.label(); }

// Basic steps of a term, first-occurrence order, one entry per step label.
inline std::vector<BadStep> badsteps(const AdTerm& t) {
  std::vector<BadStep> out;
  std::set<std::string> seen;
  auto walk = [&](auto&& self, const AdTerm& node) -> void {
    if (node.kind() == TermKind::bad_step) {
      if (seen.insert(node.step().step).second) out.push_back(node.step());
      return;
    }
    for (const AdTerm& c : node.children()) self(self, c);
  };
  walk(walk, t);
  return out;
}

// Security patterns referenced by a term's basic steps, sorted and unique.
inline std::vector<std::string> pattern_set(const AdTerm& t) {
  std::set<std::string> acc;
  for (const BadStep& b : badsteps(t)) acc.insert(b.patterns.begin(), b.patterns.end());
  return {acc.begin(), acc.end()};
}

using Assignment = std::map<std::string, bool>;

// Boolean evaluation of a refinement-only term under an assignment of its
// leaves. Disjunction is OR; both conjunctions are AND.
inline bool eval(const AdTerm& t, const Assignment& sigma) {
  switch (t.kind()) {
    case TermKind::atom:
    case TermKind::bad_step: {
      auto it = sigma.find(atom_key(t));
      if (it == sigma.end())
        throw NotFoundError("no assignment for atom '" + atom_key(t) + "'");
      return it->second;
    }
    case TermKind::counter:
      throw MalformedTermError("eval is defined on refinement operators only: " + to_string(t));
    case TermKind::disjunction: {
      for (const AdTerm& c : t.children())
        if (eval(c, sigma)) return true;
      return false;
    }
    default: {
      for (const AdTerm& c : t.children())
        if (!eval(c, sigma)) return false;
      return true;
    }
  }
}

// One clause of the disjunctive normal form: the basic steps an attacker
// must carry out, in left-to-right order. `ordered` records whether every
// conjunction contributing to the clause was sequential.
struct Scenario {
  AdTerm term;
  std::vector<BadStep> steps;
  bool ordered = true;

  std::vector<std::string> step_labels() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const BadStep& b : steps) out.push_back(b.step);
    return out;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

struct Clause {
  std::vector<AdTerm> atoms;  // basic-step leaves
  bool ordered = true;
};

inline void ensure_scenario_capacity(std::size_t n, std::size_t limit) {
  if (n > limit) throw ScenarioLimitError(limit);
}

inline std::vector<Clause> dnf(const AdTerm& t, std::size_t limit) {
  switch (t.kind()) {
    case TermKind::bad_step:
      return {Clause{{t}, true}};
    case TermKind::atom:
      throw MalformedTermError("attack leaf '" + t.label() +
                               "' is not a basic attack-defense step");
    case TermKind::counter:
      throw MalformedTermError("counter term left unresolved: " + to_string(t));
    case TermKind::disjunction: {
      std::vector<Clause> out;
      for (const AdTerm& c : t.children()) {
        std::vector<Clause> sub = dnf(c, limit);
        ensure_scenario_capacity(out.size() + sub.size(), limit);
        for (Clause& cl : sub) out.push_back(std::move(cl));
      }
      return out;
    }
    default: {  // conjunction / seq_conjunction: ordered cross product
      bool sequential = t.kind() == TermKind::seq_conjunction;
      std::vector<Clause> acc{Clause{{}, true}};
      for (const AdTerm& c : t.children()) {
        std::vector<Clause> sub = dnf(c, limit);
        ensure_scenario_capacity(acc.size() * sub.size(), limit);
        std::vector<Clause> next;
        next.reserve(acc.size() * sub.size());
        for (const Clause& left : acc) {
          for (const Clause& right : sub) {
            Clause merged;
            merged.atoms = left.atoms;
            merged.atoms.insert(merged.atoms.end(), right.atoms.begin(), right.atoms.end());
            bool glue = sequential || left.atoms.empty() || right.atoms.empty();
            merged.ordered = left.ordered && right.ordered && glue;
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
}

}  // namespace detail

// Attack scenarios: the clauses of the disjunctive normal form of a
// generated-form term. Sequential conjunction distributes over disjunction
// preserving left-to-right order; clauses whose ordered atom sequences are
// equal are merged. Extraction aborts once the clause count would exceed
// `max_scenarios`.
inline constexpr std::size_t default_scenario_limit = 10000;

inline std::vector<Scenario> extract_scenarios(const AdTerm& t,
                                               std::size_t max_scenarios = default_scenario_limit) {
  std::vector<detail::Clause> clauses = detail::dnf(t, max_scenarios);
  std::vector<Scenario> out;
  std::set<std::vector<std::string>> seen;
  for (detail::Clause& cl : clauses) {
    std::vector<std::string> key;
    key.reserve(cl.atoms.size());
    for (const AdTerm& a : cl.atoms) key.push_back(atom_key(a));
    if (!seen.insert(key).second) continue;
    bool ordered = cl.ordered || cl.atoms.size() == 1;
    std::vector<BadStep> steps;
    steps.reserve(cl.atoms.size());
    for (const AdTerm& a : cl.atoms) steps.push_back(a.step());
    AdTerm term = cl.atoms.size() == 1
                      ? std::move(cl.atoms.front())
                      : (ordered ? seq_p(std::move(cl.atoms)) : and_p(std::move(cl.atoms)));
    out.push_back(Scenario{std::move(term), std::move(steps), ordered});
  }
  return out;
}

// Violation of the generated-form grammar
//   T ::= v^p(T..) | seq^p(S..) | B      S ::= seq^p(S..) | B
// where B is a basic attack-defense step.
struct FormViolation {
  std::string subterm;
  std::string reason;
};

namespace detail {

inline std::optional<FormViolation> violation(const AdTerm& t, bool disjunction_allowed) {
  switch (t.kind()) {
    case TermKind::bad_step:
      return std::nullopt;
    case TermKind::atom:
      return FormViolation{to_string(t), "unexpanded attack leaf"};
    case TermKind::counter:
      return FormViolation{to_string(t),
                           "counter term is not a basic step (alternative left unresolved)"};
    case TermKind::conjunction:
      return FormViolation{to_string(t), "parallel conjunction is not a generated form"};
    case TermKind::disjunction: {
      if (t.side() == Actor::opponent)
        return FormViolation{to_string(t), "opponent disjunction (alternative left unresolved)"};
      if (!disjunction_allowed)
        return FormViolation{to_string(t), "disjunction under a sequential conjunction"};
      for (const AdTerm& c : t.children())
        if (auto v = violation(c, true)) return v;
      return std::nullopt;
    }
    case TermKind::seq_conjunction: {
      if (t.side() == Actor::opponent)
        return FormViolation{to_string(t), "opponent sequential conjunction"};
      for (const AdTerm& c : t.children())
        if (auto v = violation(c, false)) return v;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<FormViolation> find_form_violation(const AdTerm& t) {
  return detail::violation(t, true);
}

inline bool check_generated_form(const AdTerm& t) { return !find_form_violation(t); }

// Replaces every atom labelled `attack_label` by `replacement` and
// re-canonicalizes. At least one occurrence must exist.
inline AdTerm substitute(const AdTerm& t, const std::string& attack_label,
                         const AdTerm& replacement) {
  std::size_t hits = 0;
  auto rebuild = [&](auto&& self, const AdTerm& node) -> AdTerm {
    switch (node.kind()) {
      case TermKind::atom:
        if (node.label() == attack_label) {
          ++hits;
          return replacement;
        }
        return node;
      case TermKind::bad_step:
        return node;
      case TermKind::counter:
        return AdTerm::counter(node.side(), self(self, node.children()[0]),
                               self(self, node.children()[1]));
      default: {
        std::vector<AdTerm> kids;
        kids.reserve(node.children().size());
        for (const AdTerm& c : node.children()) kids.push_back(self(self, c));
        if (node.kind() == TermKind::disjunction)
          return AdTerm::disjunction(node.side(), std::move(kids));
        if (node.kind() == TermKind::conjunction)
          return AdTerm::conjunction(node.side(), std::move(kids));
        return AdTerm::seq_conjunction(node.side(), std::move(kids));
      }
    }
  };
  AdTerm out = rebuild(rebuild, t);
  if (hits == 0)
    throw NotFoundError("no atom labelled '" + attack_label + "' in " + to_string(t));
  return out;
}

}  // namespace adsec
