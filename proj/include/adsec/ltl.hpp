#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adsec/errors.hpp"

namespace adsec {

// Linear temporal logic over finite traces of method-call events.
//
// Semantics, over a trace t = e1..en and positions 1..n:
//   - an atom "a" holds at i iff e_i == a;
//   - G f holds at i iff f holds at every j >= i (vacuously on the empty trace);
//   - F f holds at i iff f holds at some j >= i (never on the empty trace);
//   - not/and/or/xor are evaluated pointwise;
//   - x -> y is material implication, except that an implication whose
//     antecedent is syntactically a negation is non-vacuous:
//     (not x) -> y evaluates as (not x) and y. The exception makes the
//     else-arm of decision properties G((a -> F b) xor ((not a) -> F c))
//     an obligation that fires only where the guard event is absent,
//     instead of a vacuous truth that would cancel the xor.
// A property holds on a trace iff it holds at position 1.

enum class LtlOp { atom, not_, and_, or_, xor_, implies, always, eventually };

class LtlFormula {
 public:
  static LtlFormula atom(std::string label) {
    if (label.empty()) throw ParseError("atom label must be non-empty");
    LtlFormula f;
    f.op_ = LtlOp::atom;
    f.label_ = std::move(label);
    return f;
  }
  static LtlFormula negation(LtlFormula x) { return unary(LtlOp::not_, std::move(x)); }
  static LtlFormula always(LtlFormula x) { return unary(LtlOp::always, std::move(x)); }
  static LtlFormula eventually(LtlFormula x) { return unary(LtlOp::eventually, std::move(x)); }
  static LtlFormula conjunction(LtlFormula a, LtlFormula b) {
    return binary(LtlOp::and_, std::move(a), std::move(b));
  }
  static LtlFormula disjunction(LtlFormula a, LtlFormula b) {
    return binary(LtlOp::or_, std::move(a), std::move(b));
  }
  static LtlFormula exclusive(LtlFormula a, LtlFormula b) {
    return binary(LtlOp::xor_, std::move(a), std::move(b));
  }
  static LtlFormula implication(LtlFormula a, LtlFormula b) {
    return binary(LtlOp::implies, std::move(a), std::move(b));
  }

  LtlOp op() const { return op_; }
  const std::string& label() const { return label_; }
  const std::vector<LtlFormula>& children() const { return children_; }

  friend bool operator==(const LtlFormula& a, const LtlFormula& b) {
    return a.op_ == b.op_ && a.label_ == b.label_ && a.children_ == b.children_;
  }

 private:
  LtlFormula() = default;
  static LtlFormula unary(LtlOp op, LtlFormula x) {
    LtlFormula f;
    f.op_ = op;
    f.children_.push_back(std::move(x));
    return f;
  }
  static LtlFormula binary(LtlOp op, LtlFormula a, LtlFormula b) {
    LtlFormula f;
    f.op_ = op;
    f.children_.push_back(std::move(a));
    f.children_.push_back(std::move(b));
    return f;
  }

  LtlOp op_ = LtlOp::atom;
  std::string label_;
  std::vector<LtlFormula> children_;
};

inline std::set<std::string> alphabet(const LtlFormula& f) {
  std::set<std::string> out;
  auto walk = [&](auto&& self, const LtlFormula& g) -> void {
    if (g.op() == LtlOp::atom) {
      out.insert(g.label());
      return;
    }
    for (const LtlFormula& c : g.children()) self(self, c);
  };
  walk(walk, f);
  return out;
}

// Canonical rendering: atoms are double-quoted, every binary node prints its
// own parentheses, unary operators bind tighter than any binary one.
inline std::string to_string(const LtlFormula& f) {
  switch (f.op()) {
    case LtlOp::atom: {
      std::string out = "\"";
      for (char c : f.label()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case LtlOp::not_: return "not " + to_string(f.children()[0]);
    case LtlOp::always: return "G " + to_string(f.children()[0]);
    case LtlOp::eventually: return "F " + to_string(f.children()[0]);
    default: {
      const char* tok = f.op() == LtlOp::and_   ? "and"
                        : f.op() == LtlOp::or_  ? "or"
                        : f.op() == LtlOp::xor_ ? "xor"
                                                : "->";
      return "(" + to_string(f.children()[0]) + " " + tok + " " +
             to_string(f.children()[1]) + ")";
    }
  }
}

namespace detail {

class LtlParser {
 public:
  explicit LtlParser(std::string_view text) : text_(text) {}

  LtlFormula parse() {
    LtlFormula f = parse_implies();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("property syntax: " + msg, 1, pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool eat_token(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    // Word tokens must not run into an identifier character.
    if (tok.back() != '(' && tok != "->") {
      std::size_t after = pos_ + tok.size();
      if (after < text_.size()) {
        char c = text_[after];
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')
          return false;
      }
    }
    pos_ += tok.size();
    return true;
  }

  // implies (right assoc, loosest) > or > xor > and > unary
  LtlFormula parse_implies() {
    LtlFormula left = parse_or();
    skip_ws();
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      return LtlFormula::implication(std::move(left), parse_implies());
    }
    return left;
  }

  LtlFormula parse_or() {
    LtlFormula f = parse_xor();
    while (eat_token("or")) f = LtlFormula::disjunction(std::move(f), parse_xor());
    return f;
  }

  LtlFormula parse_xor() {
    LtlFormula f = parse_and();
    while (eat_token("xor")) f = LtlFormula::exclusive(std::move(f), parse_and());
    return f;
  }

  LtlFormula parse_and() {
    LtlFormula f = parse_unary();
    while (eat_token("and")) f = LtlFormula::conjunction(std::move(f), parse_unary());
    return f;
  }

  LtlFormula parse_unary() {
    if (eat_token("G")) return LtlFormula::always(parse_unary());
    if (eat_token("F")) return LtlFormula::eventually(parse_unary());
    if (eat_token("not")) return LtlFormula::negation(parse_unary());
    return parse_primary();
  }

  LtlFormula parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of property");
    if (text_[pos_] == '(') {
      ++pos_;
      LtlFormula f = parse_implies();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return f;
    }
    if (text_[pos_] == '"') {
      ++pos_;
      std::string label;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        label += text_[pos_++];
      }
      if (pos_ >= text_.size()) fail("unterminated atom");
      ++pos_;
      if (label.empty()) fail("empty atom");
      return LtlFormula::atom(std::move(label));
    }
    fail(std::string("unexpected character '") + text_[pos_] + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline LtlFormula parse_ltl(std::string_view text) { return detail::LtlParser(text).parse(); }

// One property per line; blank lines and lines starting with # are skipped.
inline std::vector<LtlFormula> parse_property_lines(std::string_view text) {
  std::vector<LtlFormula> out;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      try {
        out.push_back(parse_ltl(line));
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (property line " +
                         std::to_string(lineno) + ")");
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline std::string emit_property_lines(const std::vector<LtlFormula>& props) {
  std::string out;
  for (const LtlFormula& f : props) out += to_string(f) + "\n";
  return out;
}

using EventTrace = std::vector<std::string>;

struct CheckResult {
  bool holds = true;
  std::size_t violation_position = 0;  // 1-based, meaningful when !holds
};

namespace detail {

// Truth values of f at every position, computed bottom-up. For the empty
// trace the vector is empty and the scalar conventions below apply.
inline std::vector<char> truth_vector(const LtlFormula& f, const EventTrace& trace) {
  std::size_t n = trace.size();
  std::vector<char> v(n);
  switch (f.op()) {
    case LtlOp::atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = trace[i] == f.label();
      return v;
    case LtlOp::not_: {
      std::vector<char> a = truth_vector(f.children()[0], trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      return v;
    }
    case LtlOp::always: {
      std::vector<char> a = truth_vector(f.children()[0], trace);
      char acc = 1;
      for (std::size_t i = n; i-- > 0;) {
        acc = acc && a[i];
        v[i] = acc;
      }
      return v;
    }
    case LtlOp::eventually: {
      std::vector<char> a = truth_vector(f.children()[0], trace);
      char acc = 0;
      for (std::size_t i = n; i-- > 0;) {
        acc = acc || a[i];
        v[i] = acc;
      }
      return v;
    }
    default: {
      std::vector<char> a = truth_vector(f.children()[0], trace);
      std::vector<char> b = truth_vector(f.children()[1], trace);
      bool guarded = f.op() == LtlOp::implies && f.children()[0].op() == LtlOp::not_;
      for (std::size_t i = 0; i < n; ++i) {
        switch (f.op()) {
          case LtlOp::and_: v[i] = a[i] && b[i]; break;
          case LtlOp::or_: v[i] = a[i] || b[i]; break;
          case LtlOp::xor_: v[i] = a[i] != b[i]; break;
          default: v[i] = guarded ? (a[i] && b[i]) : (!a[i] || b[i]); break;
        }
      }
      return v;
    }
  }
}

// Value on the empty trace.
inline bool empty_trace_value(const LtlFormula& f) {
  switch (f.op()) {
    case LtlOp::atom: return false;
    case LtlOp::not_: return !empty_trace_value(f.children()[0]);
    case LtlOp::always: return true;
    case LtlOp::eventually: return false;
    case LtlOp::and_:
      return empty_trace_value(f.children()[0]) && empty_trace_value(f.children()[1]);
    case LtlOp::or_:
      return empty_trace_value(f.children()[0]) || empty_trace_value(f.children()[1]);
    case LtlOp::xor_:
      return empty_trace_value(f.children()[0]) != empty_trace_value(f.children()[1]);
    default: {
      bool a = empty_trace_value(f.children()[0]);
      bool b = empty_trace_value(f.children()[1]);
      return f.children()[0].op() == LtlOp::not_ ? (a && b) : (!a || b);
    }
  }
}

}  // namespace detail

inline CheckResult check(const LtlFormula& f, const EventTrace& trace) {
  if (trace.empty()) {
    bool ok = detail::empty_trace_value(f);
    return CheckResult{ok, ok ? 0 : std::size_t{1}};
  }
  std::vector<char> v = detail::truth_vector(f, trace);
  if (v[0]) return CheckResult{true, 0};
  // For a top-level G the earliest failing position of the body explains the
  // verdict; otherwise the property already fails at position 1.
  if (f.op() == LtlOp::always) {
    std::vector<char> body = detail::truth_vector(f.children()[0], trace);
    for (std::size_t i = 0; i < body.size(); ++i)
      if (!body[i]) return CheckResult{false, i + 1};
  }
  return CheckResult{false, 1};
}

// Events of `trace` that belong to `keep`, order preserved.
inline EventTrace filter_trace(const EventTrace& trace, const std::set<std::string>& keep) {
  EventTrace out;
  for (const std::string& e : trace)
    if (keep.count(e)) out.push_back(e);
  return out;
}

}  // namespace adsec
