#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adsec {

// Base class for every error raised by the library. The CLI maps any Error
// to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Malformed textual input (XML, CSV, LTL, diagrams, Gherkin, trace logs).
class ParseError : public Error {
 public:
  ParseError(std::string msg, std::size_t line = 0, std::size_t column = 0)
      : Error(locate(msg, line, column)), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string locate(const std::string& msg, std::size_t line, std::size_t column) {
    if (line == 0) return msg;
    std::string s = "line " + std::to_string(line);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ": " + msg;
  }
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a structural rule (tree shape, diagram
// shape, duplicate counter child, ...). The message names the offender.
class StructureError : public Error {
 public:
  using Error::Error;
};

// A term operation was applied outside its domain (counter operators where
// only refinements are allowed, an unexpanded attack leaf, ...).
class MalformedTermError : public Error {
 public:
  using Error::Error;
};

// Lookup of an entity (attack, step, pattern, atom, trace, case id) failed.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Scenario extraction hit the configured clause ceiling.
class ScenarioLimitError : public Error {
 public:
  explicit ScenarioLimitError(std::size_t limit)
      : Error("scenario extraction exceeded the configured ceiling of " +
              std::to_string(limit) + " scenarios"),
        limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

// Knowledge-base directory failed integrity validation on a strict load.
class KbIntegrityError : public Error {
 public:
  explicit KbIntegrityError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& vs) {
    std::string s = "knowledge base failed validation with " +
                    std::to_string(vs.size()) + " violation(s)";
    for (const auto& v : vs) s += "\n  " + v;
    return s;
  }
  std::vector<std::string> violations_;
};

// A step lacks the Given/When/Then section requested for a context.
class MissingSectionError : public Error {
 public:
  MissingSectionError(const std::string& step, const std::string& relation,
                      const std::string& context)
      : Error("step '" + step + "' has no " + relation + " section for context '" +
              context + "'"),
        relation_(relation) {}
  const std::string& relation() const { return relation_; }

 private:
  std::string relation_;
};

// Pattern choice problems.
class UnresolvedAlternativeError : public Error {
 public:
  explicit UnresolvedAlternativeError(std::vector<std::string> groups)
      : Error(join(groups)), groups_(std::move(groups)) {}
  const std::vector<std::string>& groups() const { return groups_; }

 private:
  static std::string join(const std::vector<std::string>& gs) {
    std::string s = std::to_string(gs.size()) + " Alternative group(s) have no selection";
    for (const auto& g : gs) s += "\n  " + g;
    return s;
  }
  std::vector<std::string> groups_;
};
class InvalidSelectionError : public Error {
 public:
  using Error::Error;
};
class PatternConflictError : public Error {
 public:
  using Error::Error;
};

// Verdict ingestion / security evaluation problems.
class VerdictError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failures (missing file, unreadable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace adsec
